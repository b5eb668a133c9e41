use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn with_module<F: FnOnce(&Bound<'_, PyModule>)>(f: F) {
    Python::attach(|py| {
        let m = wrap_pymodule!(trotterlab_py::trotterlab_py)(py);
        f(m.bind(py).cast::<PyModule>().unwrap());
    });
}

#[test]
fn model_round_trip_and_norms() {
    with_module(|m| {
        let spec = r#"{"family": "chain-heisenberg", "n": 3, "j": 0.5}"#;
        let h = m.call_method1("model", (spec,)).unwrap();
        assert_eq!(h.getattr("gamma").unwrap().extract::<usize>().unwrap(), 6);
        let js: String = h.call_method0("to_json").unwrap().extract().unwrap();
        let cls = m.getattr("Hamiltonian").unwrap();
        let back = cls.call_method1("from_json", (js.clone(),)).unwrap();
        assert_eq!(back.call_method0("to_json").unwrap().extract::<String>().unwrap(), js);
        let prof = h.call_method0("norms").unwrap();
        let prof = prof.cast::<PyDict>().unwrap();
        assert_eq!(prof.get_item("k").unwrap().unwrap().extract::<usize>().unwrap(), 2);
    });
}

#[test]
fn gatecount_certifies_dense_error() {
    with_module(|m| {
        let h = m.call_method1("model", (r#"{"family": "chain-heisenberg", "n": 4, "j": 1.0}"#,)).unwrap();
        let g = m.call_method1("gatecount", (&h, "nonrandom-typical", 1.0, 0.05)).unwrap();
        let r: u64 = g.get_item("r").unwrap().extract().unwrap();
        let p: f64 = g.get_item("p_star").unwrap().extract().unwrap();
        let e: f64 = h.call_method1("trotter_error", (1.0, r, 2u32, p)).unwrap().extract().unwrap();
        assert!(e <= 0.05);
    });
}

#[test]
fn bad_input_raises_value_error() {
    with_module(|m| {
        let py = m.py();
        let e = m.call_method1("model", (r#"{"family": "nope"}"#,)).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        assert!(m.call_method1("markov_tail", (1.0, -1.0, 2.0)).is_err());
    });
}
