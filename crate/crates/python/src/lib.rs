//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! polymorphisms as their JSON documents.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use polytrain::bernoulli::{self, BernoulliLab};
use polytrain::mellin::{self, NormExponent};
use polytrain::polinf;
use polytrain::train;
use polytrain::{format_q, parse_q, Flavor, Q};

fn err(e: polytrain::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Q> {
    parse_q(s).map_err(err)
}

#[pyclass(name = "FinSpace", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFinSpace(polytrain::FinSpace);

#[pymethods]
impl PyFinSpace {
    #[new]
    #[pyo3(signature = (atoms, flavor = "probability"))]
    fn new(atoms: Vec<(String, String)>, flavor: &str) -> PyResult<Self> {
        let flavor = match flavor {
            "probability" => Flavor::Probability,
            "sigma-finite" => Flavor::SigmaFinite,
            other => return Err(PyValueError::new_err(format!("unknown flavor {other:?}"))),
        };
        let atoms = atoms
            .into_iter()
            .map(|(l, w)| Ok((l, rational(&w)?)))
            .collect::<PyResult<Vec<_>>>()?;
        polytrain::FinSpace::new(atoms, flavor).map(Self).map_err(err)
    }

    #[staticmethod]
    fn uniform(n: usize) -> Self {
        Self(polytrain::FinSpace::uniform(n))
    }

    #[staticmethod]
    fn bernoulli_cube(n: usize, p: &str) -> PyResult<Self> {
        polytrain::bernoulli_cube(n, &rational(p)?).map(Self).map_err(err)
    }

    fn labels(&self) -> Vec<String> {
        self.0.labels().map(str::to_string).collect()
    }

    fn weights(&self) -> Vec<String> {
        self.0.weights().map(format_q).collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        polytrain::FinSpace::from_json(s).map(Self).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "RxMeasure", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRxMeasure(polytrain::RxMeasure);

#[pymethods]
impl PyRxMeasure {
    /// Atoms as `(t, weight)` string pairs.
    #[new]
    fn new(atoms: Vec<(String, String)>) -> PyResult<Self> {
        let atoms = atoms
            .iter()
            .map(|(t, w)| Ok((rational(t)?, rational(w)?)))
            .collect::<PyResult<Vec<_>>>()?;
        polytrain::RxMeasure::from_atoms(atoms).map(Self).map_err(err)
    }

    #[staticmethod]
    fn delta(t: &str) -> PyResult<Self> {
        polytrain::RxMeasure::delta(rational(t)?).map(Self).map_err(err)
    }

    fn atoms(&self) -> Vec<(String, String)> {
        self.0.atoms().map(|(t, w)| (format_q(t), format_q(w))).collect()
    }

    fn convolve(&self, other: &Self) -> Self {
        Self(self.0.convolve(&other.0))
    }

    fn add(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    fn mass(&self) -> String {
        format_q(&self.0.mass())
    }

    fn moment(&self) -> String {
        format_q(&self.0.moment())
    }

    fn mellin(&self, r: f64, s: f64) -> PyResult<(f64, f64)> {
        let z = self.0.mellin(r, s).map_err(err)?;
        Ok((z.re, z.im))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "Partition", frozen, from_py_object)]
#[derive(Clone)]
struct PyPartition(polytrain::Partition);

#[pymethods]
impl PyPartition {
    #[new]
    fn new(blocks: Vec<Vec<String>>) -> PyResult<Self> {
        polytrain::Partition::new(blocks).map(Self).map_err(err)
    }

    fn blocks(&self) -> Vec<Vec<String>> {
        self.0.blocks().to_vec()
    }

    fn refines(&self, coarser: &Self) -> PyResult<bool> {
        self.0.refines(&coarser.0).map_err(err)
    }
}

#[pyclass(name = "Polymorphism", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolymorphism(polytrain::Polymorphism);

#[pymethods]
impl PyPolymorphism {
    /// Atoms as `(x, y, t, m)` with string labels and rationals.
    #[new]
    fn new(src: &PyFinSpace, dst: &PyFinSpace, atoms: Vec<(String, String, String, String)>) -> PyResult<Self> {
        let atoms = atoms
            .into_iter()
            .map(|(x, y, t, m)| Ok((x, y, rational(&t)?, rational(&m)?)))
            .collect::<PyResult<Vec<_>>>()?;
        polytrain::Polymorphism::from_labeled(src.0.clone(), dst.0.clone(), atoms)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn identity(space: &PyFinSpace) -> Self {
        Self(polytrain::Polymorphism::identity(&space.0))
    }

    /// `perm[i]` is the image index of atom `i`.
    #[staticmethod]
    fn from_bijection(space: &PyFinSpace, perm: Vec<usize>) -> PyResult<Self> {
        polytrain::Polymorphism::from_bijection(&space.0, &perm).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        polytrain::Polymorphism::from_json(s).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn src(&self) -> PyFinSpace {
        PyFinSpace(self.0.src().clone())
    }

    fn dst(&self) -> PyFinSpace {
        PyFinSpace(self.0.dst().clone())
    }

    fn atoms(&self) -> Vec<(String, String, String, String)> {
        self.0
            .labeled_atoms()
            .into_iter()
            .map(|(x, y, t, m)| (x, y, format_q(&t), format_q(&m)))
            .collect()
    }

    /// Violated marginal conditions, empty when valid.
    fn validate(&self) -> Vec<String> {
        self.0.validate().iter().map(ToString::to_string).collect()
    }

    fn is_valid(&self) -> bool {
        self.0.is_valid()
    }

    /// Spread along `self`, then along `then`.
    fn compose(&self, then: &Self) -> PyResult<Self> {
        self.0.compose(&then.0).map(Self).map_err(err)
    }

    fn star(&self) -> Self {
        Self(self.0.star())
    }

    fn distance(&self, other: &Self) -> PyResult<f64> {
        polytrain::distance(&self.0, &other.0).map_err(err)
    }

    /// Row-major matrix of `(re, im)` pairs.
    fn transform(&self, r: f64, s: f64) -> PyResult<Vec<Vec<(f64, f64)>>> {
        let m = mellin::transform(&self.0, r, s).map_err(err)?;
        Ok(m.entries.iter().map(|row| row.iter().map(|z| (z.re, z.im)).collect()).collect())
    }

    /// Weighted `L^{1/r}` norm of the transform; `r` must be 0, 1/2 or 1.
    fn operator_norm(&self, r: f64, s: f64) -> PyResult<f64> {
        let exponent = NormExponent::for_r(r).map_err(err)?;
        Ok(mellin::operator_norm(&mellin::transform(&self.0, r, s).map_err(err)?, exponent))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// `(quotient_map, projection)` of a partition of `space`.
#[pyfunction]
fn cond_exp(space: &PyFinSpace, partition: &PyPartition) -> PyResult<(PyPolymorphism, PyPolymorphism)> {
    let ce = polytrain::cond_exp_poly(&space.0, &partition.0).map_err(err)?;
    Ok((PyPolymorphism(ce.quotient_map), PyPolymorphism(ce.projection)))
}

/// `(distances, [(k, r, s, defect)], identity_defect)`.
#[pyfunction]
fn closure_experiment(
    r: &PyPolymorphism,
    chain: Vec<PyPartition>,
    phi: Vec<f64>,
    psi: Vec<f64>,
    grid: Vec<(f64, f64)>,
) -> PyResult<(Vec<f64>, Vec<(usize, f64, f64, f64)>, f64)> {
    let chain: Vec<polytrain::Partition> = chain.into_iter().map(|p| p.0).collect();
    let rep = bernoulli::closure_experiment(&r.0, &chain, &phi, &psi, &grid).map_err(err)?;
    Ok((rep.distances, rep.bilinear_defects, rep.identity_defect))
}

#[pyclass(name = "FinPerm", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFinPerm(polytrain::FinPerm);

#[pymethods]
impl PyFinPerm {
    /// Cycle notation, e.g. `"(1 2)(3 5 4)"`.
    #[new]
    #[pyo3(signature = (cycles = ""))]
    fn new(cycles: &str) -> PyResult<Self> {
        cycles.parse().map(Self).map_err(err)
    }

    fn apply(&self, i: u32) -> u32 {
        self.0.apply(i)
    }

    /// `self ∘ other`: `other` acts first.
    fn compose(&self, other: &Self) -> Self {
        Self(self.0.compose(&other.0))
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "DCoset", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDCoset(polytrain::DCoset);

#[pymethods]
impl PyDCoset {
    /// `pinj` lists `(j, i)`: `j ≤ beta` is sent to `i ≤ alpha`.
    #[new]
    fn new(alpha: u32, beta: u32, pinj: Vec<(u32, u32)>) -> PyResult<Self> {
        polytrain::DCoset::new(alpha, beta, pinj).map(Self).map_err(err)
    }

    #[getter]
    fn alpha(&self) -> u32 {
        self.0.alpha
    }

    #[getter]
    fn beta(&self) -> u32 {
        self.0.beta
    }

    #[getter]
    fn pinj(&self) -> Vec<(u32, u32)> {
        self.0.pinj.clone()
    }

    fn representative(&self) -> PyFinPerm {
        PyFinPerm(self.0.representative())
    }

    fn mult(&self, other: &Self) -> PyResult<Self> {
        train::mult(&self.0, &other.0).map(Self).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyfunction]
fn dcoset_of(g: &PyFinPerm, alpha: u32, beta: u32) -> PyDCoset {
    PyDCoset(train::dcoset_of(&g.0, alpha, beta))
}

#[pyclass(name = "BernoulliLab", frozen, skip_from_py_object)]
struct PyBernoulliLab(BernoulliLab);

#[pymethods]
impl PyBernoulliLab {
    #[new]
    fn new(p: &str) -> PyResult<Self> {
        BernoulliLab::new(rational(p)?).map(Self).map_err(err)
    }

    fn s_poly(&self, g: &PyFinPerm, alpha: u32, beta: u32) -> PyResult<PyPolymorphism> {
        self.0.s_poly(&g.0, alpha, beta).map(PyPolymorphism).map_err(err)
    }

    fn compressed_op(&self, g: &PyFinPerm, alpha: u32, beta: u32) -> Vec<Vec<String>> {
        let op = self.0.compressed_op(&g.0, alpha, beta);
        op.matrix.iter().map(|row| row.iter().map(format_q).collect()).collect()
    }

    fn theorem1_check(&self, g: &PyFinPerm, h: &PyFinPerm, alpha: u32, beta: u32, gamma: u32) -> PyResult<bool> {
        Ok(self.0.theorem1_check(&g.0, &h.0, alpha, beta, gamma).map_err(err)?.holds)
    }

    /// The exact defect as a rational string; `"0/1"` when the law holds.
    fn multiplicativity_defect(&self, g: &PyFinPerm, h: &PyFinPerm, alpha: u32, beta: u32, gamma: u32) -> PyResult<String> {
        let m = self.0.multiplicativity_check(&g.0, &h.0, alpha, beta, gamma).map_err(err)?;
        Ok(format_q(&m.defect))
    }
}

#[pyclass(name = "PolyInfTriple", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolyInfTriple(polinf::PolyInfTriple);

#[pymethods]
impl PyPolyInfTriple {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        polinf::PolyInfTriple::from_json(s).map(Self).map_err(err)
    }

    #[staticmethod]
    fn embed_bijection(space: &PyFinSpace, perm: Vec<usize>) -> PyResult<Self> {
        polinf::embed_bijection_inf(&space.0, &perm).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn validate(&self) -> Vec<String> {
        self.0.validate().iter().map(ToString::to_string).collect()
    }

    fn is_valid(&self) -> bool {
        self.0.is_valid()
    }

    fn distance(&self, other: &Self) -> PyResult<f64> {
        polinf::distance_inf(&self.0, &other.0).map_err(err)
    }
}

/// Distance between the cut spreading ladder with `n` rungs and pure escape.
#[pyfunction]
#[pyo3(signature = (n, window = 4))]
fn escape_distance(n: usize, window: usize) -> PyResult<f64> {
    polinf::escape_distance(n, window).map_err(err)
}

#[pymodule]
#[pyo3(name = "polytrain")]
fn polytrain_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFinSpace>()?;
    m.add_class::<PyRxMeasure>()?;
    m.add_class::<PyPartition>()?;
    m.add_class::<PyPolymorphism>()?;
    m.add_class::<PyFinPerm>()?;
    m.add_class::<PyDCoset>()?;
    m.add_class::<PyBernoulliLab>()?;
    m.add_class::<PyPolyInfTriple>()?;
    m.add_function(wrap_pyfunction!(cond_exp, m)?)?;
    m.add_function(wrap_pyfunction!(closure_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(dcoset_of, m)?)?;
    m.add_function(wrap_pyfunction!(escape_distance, m)?)?;
    Ok(())
}
