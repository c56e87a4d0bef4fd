use pyo3::prelude::*;

#[pymodule]
fn inflectus(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
