//! Randomized harnesses for the convex-analysis facts behind the certificate: the
//! ordered scalar-product bound, ordering of subgradient components, the equivalence
//! between convexity of an isotropic tensor function and of its principal-value
//! restriction, and invariance of convexity under the linear map to (S1, S2).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{dev_value, subgradient_f};
use crate::criteria::{DeviatoricShape, Meridian, YieldCriterion};
use crate::tensor::{principal_values, spectral_decomposition, DeviatoricPair, SymmetricTensor3};

/// Relative slack of midpoint and subgradient-inequality tests.
pub const HARNESS_TOL: f64 = 1e-10;

/// A function of principal values, symmetric under permutation of its arguments.
pub trait PrincipalFunction {
    fn value(&self, s: [f64; 3]) -> f64;
    /// One element of the subdifferential at `s`.
    fn subgradient(&self, s: [f64; 3]) -> [f64; 3];
    fn name(&self) -> String;
}

/// `max(σ1, σ2, σ3)`.
pub struct MaxPrincipal;

impl PrincipalFunction for MaxPrincipal {
    fn value(&self, s: [f64; 3]) -> f64 {
        s[0].max(s[1]).max(s[2])
    }

    fn subgradient(&self, s: [f64; 3]) -> [f64; 3] {
        let mut q = [0.0; 3];
        let i = (0..3).fold(0, |best, i| if s[i] > s[best] { i } else { best });
        q[i] = 1.0;
        q
    }

    fn name(&self) -> String {
        "max-principal".into()
    }
}

/// `(σ1² + σ2² + σ3²)/2`.
pub struct HalfSquaredNorm;

impl PrincipalFunction for HalfSquaredNorm {
    fn value(&self, s: [f64; 3]) -> f64 {
        0.5 * (s[0] * s[0] + s[1] * s[1] + s[2] * s[2])
    }

    fn subgradient(&self, s: [f64; 3]) -> [f64; 3] {
        s
    }

    fn name(&self) -> String {
        "half-squared-norm".into()
    }
}

/// `σ1 σ2 σ3`, not convex; the "subgradient" is its gradient.
pub struct Determinant;

impl PrincipalFunction for Determinant {
    fn value(&self, s: [f64; 3]) -> f64 {
        s[0] * s[1] * s[2]
    }

    fn subgradient(&self, s: [f64; 3]) -> [f64; 3] {
        [s[1] * s[2], s[0] * s[2], s[0] * s[1]]
    }

    fn name(&self) -> String {
        "determinant".into()
    }
}

/// `q/g(θ)` of the deviatoric part of the principal triple.
pub struct DeviatoricPrincipal {
    crit: YieldCriterion,
}

impl DeviatoricPrincipal {
    pub fn new(shape: DeviatoricShape) -> Self {
        DeviatoricPrincipal {
            crit: YieldCriterion::new(Meridian::Offset(0.0), shape),
        }
    }
}

impl PrincipalFunction for DeviatoricPrincipal {
    fn value(&self, s: [f64; 3]) -> f64 {
        dev_value(&DeviatoricPair::from_principal(s), &self.crit.deviatoric)
    }

    fn subgradient(&self, s: [f64; 3]) -> [f64; 3] {
        let sigma = SymmetricTensor3::diag(s[0], s[1], s[2]);
        match subgradient_f(&sigma, &self.crit) {
            Ok(g) => [g.gradient.a11, g.gradient.a22, g.gradient.a33],
            Err(_) => [f64::NAN; 3],
        }
    }

    fn name(&self) -> String {
        format!("q/g[{}]", self.crit.deviatoric.label())
    }
}

/// Principal function assembled from closures.
pub struct ClosurePrincipal<V, G> {
    pub label: String,
    pub value: V,
    pub subgradient: G,
}

impl<V, G> PrincipalFunction for ClosurePrincipal<V, G>
where
    V: Fn([f64; 3]) -> f64,
    G: Fn([f64; 3]) -> [f64; 3],
{
    fn value(&self, s: [f64; 3]) -> f64 {
        (self.value)(s)
    }

    fn subgradient(&self, s: [f64; 3]) -> [f64; 3] {
        (self.subgradient)(s)
    }

    fn name(&self) -> String {
        self.label.clone()
    }
}

/// `(A·B, Σ αᵢβᵢ)` with both spectra sorted in the same algebraic order.
pub fn ordered_product_bound(a: &SymmetricTensor3, b: &SymmetricTensor3) -> (f64, f64) {
    let mut la = principal_values(a);
    let mut lb = principal_values(b);
    la.sort_by(|x, y| y.total_cmp(x));
    lb.sort_by(|x, y| y.total_cmp(x));
    (a.dot(b), la[0] * lb[0] + la[1] * lb[1] + la[2] * lb[2])
}

/// `(Qᵢ − Qⱼ)(σᵢ − σⱼ) ≥ 0` for every pair, at the element returned by `pf`.
pub fn subgradient_order_check(pf: &dyn PrincipalFunction, point: [f64; 3]) -> bool {
    let q = pf.subgradient(point);
    let scale = point
        .iter()
        .chain(q.iter())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    (0..3).all(|i| {
        ((i + 1)..3).all(|j| (q[i] - q[j]) * (point[i] - point[j]) >= -1e-12 * scale * scale)
    })
}

/// Uniformly distributed rotation from a random unit quaternion.
pub fn random_rotation<R: Rng>(rng: &mut R) -> [[f64; 3]; 3] {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let tau = 2.0 * std::f64::consts::PI;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
        b * (tau * u3).cos(),
    );
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
        ],
        [
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
        ],
        [
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Spectrum uniform in `[−1, 1]³`; one draw in five gets a repeated eigenvalue.
pub fn random_spectrum<R: Rng>(rng: &mut R) -> [f64; 3] {
    let mut l = [
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    ];
    if rng.gen_bool(0.2) {
        l[1] = l[0];
    }
    l
}

/// `R diag(λ) Rᵀ` with random spectrum and rotation.
pub fn random_symmetric<R: Rng>(rng: &mut R) -> SymmetricTensor3 {
    let l = random_spectrum(rng);
    SymmetricTensor3::diag(l[0], l[1], l[2]).rotate(&random_rotation(rng))
}

fn midpoint_excess(fa: f64, fb: f64, fm: f64) -> Option<f64> {
    let avg = 0.5 * (fa + fb);
    let excess = fm - avg;
    (excess > HARNESS_TOL * (1.0 + 0.5 * (fa.abs() + fb.abs()))).then_some(excess)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// `φ((A + B)/2) > (φ(A) + φ(B))/2`.
    Midpoint,
    /// `φ(B) < φ(A) + Q(A)·(B − A)`.
    SubgradientInequality,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorWitness {
    pub kind: ViolationKind,
    pub trial: usize,
    pub a: SymmetricTensor3,
    pub b: SymmetricTensor3,
    pub excess: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalWitness {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorHarnessReport {
    pub function: String,
    pub trials: usize,
    /// Midpoint convexity on principal triples.
    pub principal_passed: bool,
    pub principal_witness: Option<PrincipalWitness>,
    pub midpoint_violations: usize,
    pub subgradient_violations: usize,
    /// First tensor-level violation found.
    pub witness: Option<TensorWitness>,
}

impl TensorHarnessReport {
    /// Both tensor-level tests passed on every trial.
    pub fn passed(&self) -> bool {
        self.midpoint_violations == 0 && self.subgradient_violations == 0
    }
}

/// Midpoint convexity of `pf` on random principal triples.
pub fn principal_midpoint_check(
    pf: &dyn PrincipalFunction,
    trials: usize,
    seed: u64,
) -> Option<PrincipalWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let a = random_spectrum(&mut rng);
        let b = random_spectrum(&mut rng);
        let m = [
            0.5 * (a[0] + b[0]),
            0.5 * (a[1] + b[1]),
            0.5 * (a[2] + b[2]),
        ];
        if let Some(excess) = midpoint_excess(pf.value(a), pf.value(b), pf.value(m)) {
            return Some(PrincipalWitness { a, b, excess });
        }
    }
    None
}

/// `Q = Σ Qᵢ qᵢ ⊗ qᵢ`, with `(Q1, Q2, Q3)` the subgradient of `pf` at the spectrum of σ.
pub fn tensor_subgradient(
    pf: &dyn PrincipalFunction,
    sigma: &SymmetricTensor3,
) -> SymmetricTensor3 {
    let (values, vectors) = spectral_decomposition(sigma);
    SymmetricTensor3::from_spectral(pf.subgradient(values), &vectors)
}

/// Tensor-level midpoint convexity and subgradient inequality of `φ(σ) = pf(λ(σ))` on
/// random pairs `R diag(λ) Rᵀ`.
pub fn tensor_convexity_from_principal(
    pf: &dyn PrincipalFunction,
    trials: usize,
    seed: u64,
) -> TensorHarnessReport {
    let phi = |s: &SymmetricTensor3| pf.value(principal_values(s));
    let principal_witness = principal_midpoint_check(pf, trials, seed.wrapping_add(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TensorHarnessReport {
        function: pf.name(),
        trials,
        principal_passed: principal_witness.is_none(),
        principal_witness,
        midpoint_violations: 0,
        subgradient_violations: 0,
        witness: None,
    };
    for trial in 0..trials {
        let a = random_symmetric(&mut rng);
        let b = random_symmetric(&mut rng);
        let (fa, fb) = (phi(&a), phi(&b));
        let fm = phi(&((a + b) * 0.5));
        if let Some(excess) = midpoint_excess(fa, fb, fm) {
            report.midpoint_violations += 1;
            report.witness.get_or_insert(TensorWitness {
                kind: ViolationKind::Midpoint,
                trial,
                a,
                b,
                excess,
            });
        }
        let q = tensor_subgradient(pf, &a);
        let gap = fa + q.dot(&(b - a)) - fb;
        if !(gap <= HARNESS_TOL * (1.0 + fa.abs() + fb.abs() + q.norm() * (b - a).norm())) {
            report.subgradient_violations += 1;
            report.witness.get_or_insert(TensorWitness {
                kind: ViolationKind::SubgradientInequality,
                trial,
                a,
                b,
                excess: gap,
            });
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWitness {
    pub a: DeviatoricPair,
    pub b: DeviatoricPair,
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearReductionReport {
    pub plane_convex: bool,
    pub principal_convex: bool,
    pub plane_witness: Option<PlaneWitness>,
    pub principal_witness: Option<PrincipalWitness>,
    /// Each witness, carried through the linear map (forward or via the preimage
    /// `(S1, S2, −S1 − S2)`), violates convexity on the other side too.
    pub witnesses_transfer: bool,
}

impl LinearReductionReport {
    pub fn agree(&self) -> bool {
        self.plane_convex == self.principal_convex && self.witnesses_transfer
    }
}

/// Compares midpoint-convexity verdicts of `φ̂(S1, S2)` and `φ̃(σ) = φ̂(S1(σ), S2(σ))`.
pub fn linear_reduction_check<F: Fn(&DeviatoricPair) -> f64>(
    pf_dev: F,
    trials: usize,
    seed: u64,
) -> LinearReductionReport {
    let tilde = |s: [f64; 3]| pf_dev(&DeviatoricPair::from_principal(s));
    let mid2 = |a: &DeviatoricPair, b: &DeviatoricPair| {
        DeviatoricPair::new(0.5 * (a.s1 + b.s1), 0.5 * (a.s2 + b.s2))
    };
    let plane_test = |a: &DeviatoricPair, b: &DeviatoricPair| {
        midpoint_excess(pf_dev(a), pf_dev(b), pf_dev(&mid2(a, b)))
    };
    let principal_test = |a: [f64; 3], b: [f64; 3]| {
        let m = [
            0.5 * (a[0] + b[0]),
            0.5 * (a[1] + b[1]),
            0.5 * (a[2] + b[2]),
        ];
        midpoint_excess(tilde(a), tilde(b), tilde(m))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plane_witness = None;
    let mut principal_witness = None;
    for _ in 0..trials {
        if plane_witness.is_none() {
            let a = DeviatoricPair::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            let b = DeviatoricPair::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            if let Some(excess) = plane_test(&a, &b) {
                plane_witness = Some(PlaneWitness { a, b, excess });
            }
        }
        if principal_witness.is_none() {
            let a = random_spectrum(&mut rng);
            let b = random_spectrum(&mut rng);
            if let Some(excess) = principal_test(a, b) {
                principal_witness = Some(PrincipalWitness { a, b, excess });
            }
        }
        if plane_witness.is_some() && principal_witness.is_some() {
            break;
        }
    }
    let plane_ok = plane_witness.map_or(true, |w| {
        principal_test(w.a.principal(), w.b.principal()).is_some()
    });
    let principal_ok = principal_witness.map_or(true, |w| {
        plane_test(
            &DeviatoricPair::from_principal(w.a),
            &DeviatoricPair::from_principal(w.b),
        )
        .is_some()
    });
    LinearReductionReport {
        plane_convex: plane_witness.is_none(),
        principal_convex: principal_witness.is_none(),
        plane_witness,
        principal_witness,
        witnesses_transfer: plane_ok && principal_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_bound_examples() {
        let (l, r) = ordered_product_bound(
            &SymmetricTensor3::diag(2.0, 1.0, 0.0),
            &SymmetricTensor3::diag(3.0, 1.0, 0.0),
        );
        assert!((l - 7.0).abs() < 1e-12 && (r - 7.0).abs() < 1e-12);
        let (l, r) = ordered_product_bound(
            &SymmetricTensor3::diag(2.0, 1.0, 0.0),
            &SymmetricTensor3::diag(1.0, 3.0, 0.0),
        );
        assert!((l - 5.0).abs() < 1e-12 && (r - 7.0).abs() < 1e-12);
    }

    #[test]
    fn order_check_examples() {
        assert!(subgradient_order_check(&MaxPrincipal, [3.0, 2.0, 1.0]));
        assert_eq!(MaxPrincipal.subgradient([3.0, 2.0, 1.0]), [1.0, 0.0, 0.0]);
        assert!(subgradient_order_check(&HalfSquaredNorm, [-0.3, 2.0, 1.1]));
        let reversed = ClosurePrincipal {
            label: "tie".into(),
            value: |_s: [f64; 3]| 0.0,
            subgradient: |_s| [0.0, 1.0, 0.0],
        };
        assert!(subgradient_order_check(&reversed, [1.0, 1.0, 0.5]));
        assert!(!subgradient_order_check(&reversed, [1.0, 0.9, 0.5]));
    }

    #[test]
    fn rotations_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let r = random_rotation(&mut rng);
            for i in 0..3 {
                for j in 0..3 {
                    let d: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                    assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn harness_examples() {
        assert!(tensor_convexity_from_principal(&MaxPrincipal, 500, 0).passed());
        let det = tensor_convexity_from_principal(&Determinant, 500, 0);
        assert!(!det.passed() && !det.principal_passed);
        assert!(det.witness.is_some());
        assert!(tensor_convexity_from_principal(
            &DeviatoricPrincipal::new(DeviatoricShape::constant()),
            500,
            0
        )
        .passed());
    }

    #[test]
    fn reduction_examples() {
        let r = linear_reduction_check(|s| s.q(), 2000, 0);
        assert!(r.plane_convex && r.principal_convex && r.agree());
        let r = linear_reduction_check(|s| -s.q(), 2000, 0);
        assert!(!r.plane_convex && !r.principal_convex && r.agree());
    }
}
