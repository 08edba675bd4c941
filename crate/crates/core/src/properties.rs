//! Residual-based decisions for the curvature conditions of a Walker metric
//! at a point: the five operator commutativity conditions, Einstein,
//! Ricci-flat, nilpotent Jacobi operators, sampled Osserman, (anti-)self-duality,
//! the range/kernel condition and the coefficient conditions on `g34`.
//!
//! Every residual has the form `|r| / (1 + scale)` where `scale` is the largest
//! magnitude entering `r`, and a property holds when its residual does not
//! exceed the threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Point, ScalarField};
use crate::linalg::{bilinear, merge_root_clusters, monic_roots, Mat};
use crate::operators::{basis, jacobi, jacobi_polarized, ricci, skew_curvature, weyl_split, Ricci};
use crate::walker::{point_curvature, PointCurvature, WalkerMetric};
use crate::Matrix4;

pub const DEFAULT_THRESHOLD: f64 = 1e-9;
pub const OSSERMAN_THRESHOLD: f64 = 1e-8;
/// A "fails" expectation is only asserted when the residual reaches this.
pub const FAILS_MARGIN: f64 = 1e-3;
/// Sampled vectors with `g(x, x)` at or below this are discarded.
pub const CAUSAL_EPS: f64 = 1e-3;
pub const MIN_SPACELIKE: usize = 10;
pub const DEFAULT_SAMPLES: usize = 50;
/// Reported roots closer than this (relative to the coefficient size) are
/// treated as one repeated root.
pub const ROOT_CLUSTER: f64 = 1e-4;
/// Overall sign under which sampled spectra are compared with the
/// eigenvalue lists `{0, 4k, k, k}`: spacelike normalization already
/// reproduces them, so no flip.
pub const SPECTRUM_SIGN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    JacobiRicci,
    CurvatureRicci,
    JacobiJacobi,
    CurvatureJacobi,
    CurvatureCurvature,
    Einstein,
    RicciFlat,
    NilpotentJacobi,
    OssermanSampled,
    SelfDual,
    AntiSelfDual,
    ConformallyOsserman,
    #[serde(rename = "range_kernel_p")]
    RangeKernelP,
    #[serde(rename = "thm13_3c")]
    Thm13_3c,
    #[serde(rename = "thm15_3")]
    Thm15_3,
    #[serde(rename = "thm13_2")]
    Thm13_2,
    AffineOsserman,
}

impl Property {
    pub const COMMUTING: [Property; 5] = [
        Property::JacobiRicci,
        Property::CurvatureRicci,
        Property::JacobiJacobi,
        Property::CurvatureJacobi,
        Property::CurvatureCurvature,
    ];

    pub const ALL: [Property; 17] = [
        Property::JacobiRicci,
        Property::CurvatureRicci,
        Property::JacobiJacobi,
        Property::CurvatureJacobi,
        Property::CurvatureCurvature,
        Property::Einstein,
        Property::RicciFlat,
        Property::NilpotentJacobi,
        Property::OssermanSampled,
        Property::SelfDual,
        Property::AntiSelfDual,
        Property::ConformallyOsserman,
        Property::RangeKernelP,
        Property::Thm13_3c,
        Property::Thm15_3,
        Property::Thm13_2,
        Property::AffineOsserman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::JacobiRicci => "jacobi_ricci",
            Property::CurvatureRicci => "curvature_ricci",
            Property::JacobiJacobi => "jacobi_jacobi",
            Property::CurvatureJacobi => "curvature_jacobi",
            Property::CurvatureCurvature => "curvature_curvature",
            Property::Einstein => "einstein",
            Property::RicciFlat => "ricci_flat",
            Property::NilpotentJacobi => "nilpotent_jacobi",
            Property::OssermanSampled => "osserman_sampled",
            Property::SelfDual => "self_dual",
            Property::AntiSelfDual => "anti_self_dual",
            Property::ConformallyOsserman => "conformally_osserman",
            Property::RangeKernelP => "range_kernel_p",
            Property::Thm13_3c => "thm13_3c",
            Property::Thm15_3 => "thm15_3",
            Property::Thm13_2 => "thm13_2",
            Property::AffineOsserman => "affine_osserman",
        }
    }

    pub fn default_threshold(self) -> f64 {
        match self {
            Property::OssermanSampled => OSSERMAN_THRESHOLD,
            _ => DEFAULT_THRESHOLD,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Property::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::Usage(format!("unknown property `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
        })
    }
}

/// Per-property threshold overrides on top of the defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Thresholds(pub BTreeMap<Property, f64>);

impl Thresholds {
    pub fn get(&self, p: Property) -> f64 {
        self.0.get(&p).copied().unwrap_or_else(|| p.default_threshold())
    }
}

/// Where the largest residual was found: the point and the basis indices
/// (0-based) or sample number that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub property: Property,
    pub residual: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Eigenvalues `(re, im)` of the common Jacobi characteristic polynomial
    /// when the sampled Osserman check holds.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<Vec<(f64, f64)>>,
}

impl PropertyEntry {
    pub fn new(property: Property, residual: f64, threshold: f64, witness: Witness) -> Self {
        // NaN residuals never hold
        let verdict = if residual <= threshold { Verdict::Holds } else { Verdict::Fails };
        PropertyEntry { property, residual, threshold, verdict, witness: Some(witness), spectrum: None }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Fails with a residual at least [`FAILS_MARGIN`].
    pub fn fails_robustly(&self) -> bool {
        !self.holds() && self.residual >= FAILS_MARGIN
    }

    /// Spectrum real parts, sorted.
    pub fn spectrum_real(&self) -> Option<Vec<f64>> {
        self.spectrum.as_ref().map(|s| s.iter().map(|z| z.0).collect())
    }
}

/// Running maximum of a normalized residual together with its witness indices.
struct Worst {
    residual: f64,
    indices: Vec<usize>,
    seen: bool,
}

impl Worst {
    fn new() -> Self {
        Worst { residual: 0.0, indices: Vec::new(), seen: false }
    }

    /// Keeps the larger residual; a NaN, once offered, is never replaced.
    fn offer(&mut self, residual: f64, indices: &[usize]) {
        if self.residual.is_nan() {
            return;
        }
        if !self.seen || residual > self.residual || residual.is_nan() {
            self.residual = residual;
            self.indices = indices.to_vec();
            self.seen = true;
        }
    }

    fn entry(self, property: Property, point: &[f64; 4], thresholds: &Thresholds) -> PropertyEntry {
        let witness = Witness { point: point.to_vec(), indices: self.indices };
        PropertyEntry::new(property, self.residual, thresholds.get(property), witness)
    }
}

fn commutator_residual(a: &Matrix4, b: &Matrix4) -> f64 {
    let ab = *a * *b;
    let ba = *b * *a;
    (ab - ba).frobenius() / (1.0 + ab.max_abs().max(ba.max_abs()))
}

/// Curvature data and the basis-indexed operator families at one point.
pub struct PointOperators {
    pub point: [f64; 4],
    pub curvature: PointCurvature<f64>,
    pub ricci: Ricci<f64>,
    /// `J(e_i, e_j)` for `i <= j`.
    pub jacobi: Vec<([usize; 2], Matrix4)>,
    /// `R(e_k, e_l)` for `k < l`.
    pub skew: Vec<([usize; 2], Matrix4)>,
}

impl PointOperators {
    pub fn new(m: &WalkerMetric, p: &Point<f64, 4>) -> Result<Self> {
        let curvature = point_curvature(m, p)?;
        let ricci = ricci(&curvature);
        let mut jac = Vec::with_capacity(10);
        let mut skew = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i..4 {
                jac.push(([i, j], jacobi_polarized(&curvature, &basis(i), &basis(j))));
                if i < j {
                    skew.push(([i, j], skew_curvature(&curvature, &basis(i), &basis(j))));
                }
            }
        }
        Ok(PointOperators { point: p.0, curvature, ricci, jacobi: jac, skew })
    }

    /// `1 + max |R_ijkl|`.
    pub fn curvature_scale(&self) -> f64 {
        1.0 + self.curvature.tensor.max_abs()
    }
}

/// Evaluates one of the five commutativity conditions on its polarized
/// basis family.
pub fn check_commuting(ops: &PointOperators, kind: Property, thresholds: &Thresholds) -> Result<PropertyEntry> {
    let rho = &ops.ricci.operator;
    let mut worst = Worst::new();
    let pairs = |a: &[([usize; 2], Matrix4)], b: &[([usize; 2], Matrix4)], worst: &mut Worst, same: bool| {
        for (ia, (ka, ma)) in a.iter().enumerate() {
            for (kb, mb) in b.iter().skip(if same { ia + 1 } else { 0 }) {
                worst.offer(commutator_residual(ma, mb), &[ka[0], ka[1], kb[0], kb[1]]);
            }
        }
    };
    match kind {
        Property::JacobiRicci | Property::CurvatureRicci => {
            let family = if kind == Property::JacobiRicci { &ops.jacobi } else { &ops.skew };
            for (k, m) in family {
                worst.offer(commutator_residual(rho, m), k);
            }
        }
        Property::JacobiJacobi => pairs(&ops.jacobi, &ops.jacobi, &mut worst, true),
        Property::CurvatureJacobi => pairs(&ops.jacobi, &ops.skew, &mut worst, false),
        Property::CurvatureCurvature => pairs(&ops.skew, &ops.skew, &mut worst, true),
        other => return Err(Error::Usage(format!("`{other}` is not a commutativity condition"))),
    }
    Ok(worst.entry(kind, &ops.point, thresholds))
}

pub fn check_einstein(ops: &PointOperators, thresholds: &Thresholds) -> PropertyEntry {
    let rho = &ops.ricci.operator;
    let dev = *rho - Mat::identity().scale(rho.trace() / 4.0);
    let mut worst = Worst::new();
    worst.offer(dev.frobenius() / (1.0 + rho.max_abs()), &[]);
    worst.entry(Property::Einstein, &ops.point, thresholds)
}

pub fn check_ricci_flat(ops: &PointOperators, thresholds: &Thresholds) -> PropertyEntry {
    let mut worst = Worst::new();
    worst.offer(ops.ricci.operator.frobenius() / ops.curvature_scale(), &[]);
    worst.entry(Property::RicciFlat, &ops.point, thresholds)
}

/// Seeded vectors uniform in `[-1, 1]^4`.
pub fn sample_vectors(seed: u64) -> impl Iterator<Item = [f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::repeat_with(move || std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)))
}

pub fn check_nilpotent_jacobi(
    ops: &PointOperators,
    samples: usize,
    seed: u64,
    thresholds: &Thresholds,
) -> PropertyEntry {
    let mut worst = Worst::new();
    for (n, x) in sample_vectors(seed).take(samples).enumerate() {
        let j = jacobi(&ops.curvature, &x);
        let sq = j * j;
        worst.offer(sq.frobenius() / (1.0 + j.max_abs() * j.max_abs()), &[n]);
    }
    worst.entry(Property::NilpotentJacobi, &ops.point, thresholds)
}

/// Samples `samples` unit spacelike vectors, compares the characteristic
/// polynomials of their Jacobi operators and, when they agree, reports the
/// roots of the common polynomial.
pub fn check_osserman_sampled(
    ops: &PointOperators,
    samples: usize,
    seed: u64,
    thresholds: &Thresholds,
) -> Result<PropertyEntry> {
    let g = &ops.curvature.metric;
    let mut polys: Vec<Vec<f64>> = Vec::with_capacity(samples);
    for x in sample_vectors(seed).take(samples.max(1) * 100) {
        let norm = bilinear(g, &x, &x);
        if norm <= CAUSAL_EPS {
            continue;
        }
        let unit = x.map(|v| v / norm.sqrt());
        polys.push(jacobi(&ops.curvature, &unit).charpoly());
        if polys.len() == samples {
            break;
        }
    }
    if polys.len() < MIN_SPACELIKE {
        return Err(Error::Sampling(format!(
            "only {} spacelike samples with g(x,x) > {CAUSAL_EPS} (need {MIN_SPACELIKE})",
            polys.len()
        )));
    }
    let mut worst = Worst::new();
    let scale = polys.iter().flatten().fold(0.0f64, |a, c| a.max(c.abs()));
    for k in 1..5 {
        let (lo, hi) =
            polys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[k]), hi.max(p[k])));
        worst.offer((hi - lo) / (1.0 + scale), &[k]);
    }
    let mut entry = worst.entry(Property::OssermanSampled, &ops.point, thresholds);
    if entry.holds() {
        let mean: Vec<f64> = (0..5).map(|k| polys.iter().map(|p| p[k]).sum::<f64>() / polys.len() as f64).collect();
        let radius = 1.0 + mean.iter().skip(1).fold(0.0f64, |a, c| a.max(c.abs()));
        let roots: Vec<Complex<f64>> = merge_root_clusters(&monic_roots(&mean), ROOT_CLUSTER * radius);
        entry.spectrum = Some(roots.iter().map(|z| (SPECTRUM_SIGN * z.re, SPECTRUM_SIGN * z.im)).collect());
    }
    Ok(entry)
}

/// Self-dual, anti-self-dual and conformally Osserman entries. The last
/// holds exactly when one of the first two does.
pub fn check_sd_asd(ops: &PointOperators, thresholds: &Thresholds) -> [PropertyEntry; 3] {
    let split = weyl_split(&ops.curvature);
    let scale = ops.curvature_scale();
    let sd = split.anti_self_dual_part() / scale;
    let asd = split.self_dual_part() / scale;
    let make = |prop, r| {
        let mut w = Worst::new();
        w.offer(r, &[]);
        w.entry(prop, &ops.point, thresholds)
    };
    let sd = make(Property::SelfDual, sd);
    let asd = make(Property::AntiSelfDual, asd);
    let mut conf = make(Property::ConformallyOsserman, sd.residual.min(asd.residual));
    conf.verdict = if sd.holds() || asd.holds() { Verdict::Holds } else { Verdict::Fails };
    [sd, asd, conf]
}

/// `R(x, y) z ∈ span{∂1, ∂2}` for all arguments and `R(x, y) z = 0`
/// whenever one argument lies in that span.
pub fn check_range_kernel_p(ops: &PointOperators, thresholds: &Thresholds) -> PropertyEntry {
    let endo = &ops.curvature.endo;
    let scale = ops.curvature_scale();
    let mut worst = Worst::new();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let v = endo[i][j][k];
                let in_p = i < 2 || j < 2 || k < 2;
                let bad = if in_p { v.iter().fold(0.0f64, |a, c| a.max(c.abs())) } else { v[2].abs().max(v[3].abs()) };
                worst.offer(bad / scale, &[i, j, k]);
            }
        }
    }
    worst.entry(Property::RangeKernelP, &ops.point, thresholds)
}

/// Decomposition `g34 = x1 p + x2 q + s + rest` used by the coefficient
/// conditions; `p`, `q`, `s` are expected to depend on `(x3, x4)` only.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpFields {
    pub p: ScalarField,
    pub q: ScalarField,
    pub s: ScalarField,
}

impl WarpFields {
    /// `p = ∂1 g34`, `q = ∂2 g34`, `s = g34 - x1 p - x2 q`. Exact when
    /// `g34` is affine in `(x1, x2)`; otherwise the condition checks report
    /// the failure.
    pub fn from_g34(g34: &ScalarField) -> Self {
        let p = g34.derivative(1);
        let q = g34.derivative(2);
        let s = g34.clone() - ScalarField::coord(1) * p.clone() - ScalarField::coord(2) * q.clone();
        WarpFields { p, q, s }
    }
}

/// Coefficient conditions on the warping function: `thm13_3c` is the
/// Osserman system, `thm15_3` is `p_3 = q_4`, `thm13_2` the anti-self-dual
/// conditions, where the remainder `g34 - x1 p - x2 q - s` may be any
/// `ξ(x1, x4) + η(x2, x3)`.
pub fn check_thm_conditions(
    g34: &ScalarField,
    warp: &WarpFields,
    pt: &Point<f64, 4>,
    which: Property,
    thresholds: &Thresholds,
) -> Result<PropertyEntry> {
    let pj = warp.p.eval_jet2(pt)?;
    let qj = warp.q.eval_jet2(pt)?;
    let sj = warp.s.eval_jet2(pt)?;
    let gj = g34.eval_jet2(pt)?;
    let (x1, x2) = (pt.0[0], pt.0[1]);
    let rest = gj - (pj * coord_jet(pt, 0) + qj * coord_jet(pt, 1) + sj);
    let (p, q) = (pj.value, qj.value);
    let (p3, p4, q3, q4) = (pj.grad[2], pj.grad[3], qj.grad[2], qj.grad[3]);
    let mut worst = Worst::new();
    // p, q, s must not depend on x1, x2
    for (n, j) in [&pj, &qj, &sj].into_iter().enumerate() {
        let dep = j.grad[0].abs().max(j.grad[1].abs());
        worst.offer(dep / (1.0 + j.value.abs()), &[n]);
    }
    let mag = |vals: &[f64]| vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    match which {
        Property::Thm13_3c | Property::Thm15_3 => {
            let r = mag(&[rest.value]).max(mag(&rest.grad)).max(mag(rest.hess.as_flattened()));
            worst.offer(r / (1.0 + gj.value.abs()), &[3]);
            if which == Property::Thm13_3c {
                let scale = mag(&[p * p, q * q, p * q, 2.0 * p4, 2.0 * q3, p3, q4]);
                worst.offer((p * p - 2.0 * p4).abs() / (1.0 + scale), &[4]);
                worst.offer((q * q - 2.0 * q3).abs() / (1.0 + scale), &[5]);
                worst.offer((p * q - p3 - q4).abs() / (1.0 + scale), &[6]);
            } else {
                worst.offer((p3 - q4).abs() / (1.0 + p3.abs().max(q4.abs())), &[4]);
            }
        }
        Property::Thm13_2 => {
            // ξ(x1, x4) + η(x2, x3) has no (12), (13), (24), (34) second derivatives
            let h = &rest.hess;
            let r = mag(&[h[0][1], h[0][2], h[1][3], h[2][3]]);
            worst.offer(r / (1.0 + mag(h.as_flattened())), &[3]);
            worst.offer((p3 - q4).abs() / (1.0 + p3.abs().max(q4.abs())), &[4]);
            let (p34, p33, s34) = (pj.hess[2][3], pj.hess[2][2], sj.hess[2][3]);
            let terms = [gj.value * p3, x1 * p34, x2 * p33, s34];
            worst.offer((terms[0] - terms[1] - terms[2] - terms[3]).abs() / (1.0 + mag(&terms)), &[5]);
        }
        other => return Err(Error::Usage(format!("`{other}` is not a coefficient condition"))),
    }
    Ok(worst.entry(which, &pt.0, thresholds))
}

/// Jet of the coordinate in `slot`.
fn coord_jet(pt: &Point<f64, 4>, slot: usize) -> crate::Jet4 {
    crate::Jet2::variable(slot, pt.0[slot])
}

/// Settings shared by every point of an analysis.
#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub thresholds: Thresholds,
    pub samples: usize,
    pub seed: u64,
    /// Decomposition used for the coefficient conditions; derived from `g34`
    /// when absent. Only consulted for restricted metrics.
    pub warp: Option<WarpFields>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { thresholds: Thresholds::default(), samples: DEFAULT_SAMPLES, seed: 0, warp: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointAnalysis {
    pub point: Vec<f64>,
    pub entries: Vec<PropertyEntry>,
}

impl PointAnalysis {
    pub fn get(&self, p: Property) -> Option<&PropertyEntry> {
        self.entries.iter().find(|e| e.property == p)
    }

    pub fn holds(&self, p: Property) -> Option<bool> {
        self.get(p).map(PropertyEntry::holds)
    }
}

/// Runs every metric check at one point. The coefficient conditions are
/// only evaluated for restricted metrics.
pub fn analyze_point(m: &WalkerMetric, pt: &Point<f64, 4>, opts: &AnalysisOptions) -> Result<PointAnalysis> {
    let ops = PointOperators::new(m, pt)?;
    let th = &opts.thresholds;
    let mut entries = Vec::new();
    for kind in Property::COMMUTING {
        entries.push(check_commuting(&ops, kind, th)?);
    }
    entries.push(check_einstein(&ops, th));
    entries.push(check_ricci_flat(&ops, th));
    entries.push(check_nilpotent_jacobi(&ops, opts.samples, opts.seed, th));
    entries.push(check_osserman_sampled(&ops, opts.samples, opts.seed, th)?);
    entries.extend(check_sd_asd(&ops, th));
    entries.push(check_range_kernel_p(&ops, th));
    if m.is_restricted() {
        let warp = opts.warp.clone().unwrap_or_else(|| WarpFields::from_g34(m.g34()));
        for which in [Property::Thm13_3c, Property::Thm15_3, Property::Thm13_2] {
            entries.push(check_thm_conditions(m.g34(), &warp, pt, which, th)?);
        }
    }
    Ok(PointAnalysis { point: pt.0.to_vec(), entries })
}

/// A logical relation between verdicts that the theory guarantees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Implication {
    /// The first property holding forces all the others.
    Implies(Property, &'static [Property]),
    /// All listed properties share one verdict.
    Equivalent(&'static [Property]),
    /// The first holds exactly when one of the others does.
    EitherOf(Property, &'static [Property]),
}

/// Relations valid for restricted metrics.
pub const RESTRICTED_IMPLICATIONS: &[Implication] = &[
    Implication::Implies(
        Property::Thm13_3c,
        &[
            Property::RicciFlat,
            Property::Einstein,
            Property::OssermanSampled,
            Property::JacobiJacobi,
            Property::CurvatureJacobi,
            Property::NilpotentJacobi,
            Property::RangeKernelP,
        ],
    ),
    Implication::Implies(
        Property::Thm15_3,
        &[Property::JacobiRicci, Property::CurvatureRicci, Property::CurvatureCurvature],
    ),
    Implication::Equivalent(&[Property::JacobiRicci, Property::CurvatureRicci, Property::CurvatureCurvature]),
    Implication::Equivalent(&[Property::Einstein, Property::RicciFlat, Property::OssermanSampled]),
    Implication::Equivalent(&[
        Property::RicciFlat,
        Property::JacobiJacobi,
        Property::CurvatureJacobi,
        Property::NilpotentJacobi,
        Property::RangeKernelP,
    ]),
];

/// Relations valid for every metric.
pub const GENERAL_IMPLICATIONS: &[Implication] =
    &[Implication::EitherOf(Property::ConformallyOsserman, &[Property::SelfDual, Property::AntiSelfDual])];

impl Implication {
    /// `None` when satisfied (or when a property was not evaluated),
    /// otherwise a description of the violation.
    pub fn violation(&self, a: &PointAnalysis) -> Option<String> {
        let show = |p: Property| format!("{p}={}", if a.holds(p) == Some(true) { "holds" } else { "fails" });
        match *self {
            Implication::Implies(lhs, rhs) => {
                if a.holds(lhs)? {
                    let broken: Vec<String> =
                        rhs.iter().filter(|&&p| a.holds(p) == Some(false)).map(|&p| show(p)).collect();
                    if !broken.is_empty() {
                        return Some(format!("{lhs} holds but {}", broken.join(", ")));
                    }
                }
                None
            }
            Implication::Equivalent(props) => {
                let verdicts: Vec<bool> = props.iter().filter_map(|&p| a.holds(p)).collect();
                if verdicts.iter().any(|&v| v != verdicts[0]) {
                    let parts: Vec<String> = props.iter().map(|&p| show(p)).collect();
                    return Some(format!("verdicts disagree: {}", parts.join(", ")));
                }
                None
            }
            Implication::EitherOf(lhs, rhs) => {
                let l = a.holds(lhs)?;
                let r = rhs.iter().any(|&p| a.holds(p) == Some(true));
                (l != r).then(|| {
                    let parts: Vec<String> = rhs.iter().map(|&p| show(p)).collect();
                    format!("{} but {}", show(lhs), parts.join(", "))
                })
            }
        }
    }
}

/// Every violated relation at `a`, prefixed with the point.
pub fn implication_violations(restricted: bool, a: &PointAnalysis) -> Vec<String> {
    let rules = GENERAL_IMPLICATIONS.iter().chain(if restricted { RESTRICTED_IMPLICATIONS } else { &[] });
    rules.filter_map(|rule| rule.violation(a)).map(|v| format!("at {:?}: {v}", a.point)).collect()
}

/// Per-property maximum over points; ties keep the earliest point, so the
/// result does not depend on evaluation order.
pub fn merge_max(points: &[PointAnalysis]) -> Vec<PropertyEntry> {
    let mut merged: BTreeMap<Property, PropertyEntry> = BTreeMap::new();
    for a in points {
        for e in &a.entries {
            match merged.get(&e.property) {
                Some(cur) if !(e.residual > cur.residual) && !e.residual.is_nan() => {}
                Some(cur) if cur.residual.is_nan() => {}
                _ => {
                    merged.insert(e.property, e.clone());
                }
            }
        }
    }
    // conformal Osserman keeps its "either half" verdict per point
    if let Some(conf) = merged.get_mut(&Property::ConformallyOsserman) {
        let all = points.iter().all(|a| a.holds(Property::ConformallyOsserman) != Some(false));
        conf.verdict = if all { Verdict::Holds } else { Verdict::Fails };
    }
    merged.into_values().collect()
}
