use pyo3::prelude::*;

#[pymodule]
fn fieldvision_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
