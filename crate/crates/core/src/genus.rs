//! Genera from conductors, aggregation over elementary abelian extensions,
//! the big-action inequality, and an audit of closed-form values.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Fq};
use crate::laurent::LaurentPoly;
use crate::local::{build_uniformizer, conductor_of_expansion, expand_at_infinity, Chart, ConductorResult, Expansion, UniformizerData};
use crate::params::Params;
use crate::tower::{PresentationKind, Tower};

/// Degree-`p` subextension classes.
///
/// The first four are the subfields of `F/K(y1)`, grouped by the highest
/// generator in the line; the last two are the subfields of `K(y1, y2)/K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoverClass {
    Y2,
    V1,
    V2,
    W,
    Y1OverK,
    ReeLine,
}

impl CoverClass {
    pub const OVER_Y1: [CoverClass; 4] = [CoverClass::Y2, CoverClass::V1, CoverClass::V2, CoverClass::W];
    pub const OVER_K: [CoverClass; 2] = [CoverClass::Y1OverK, CoverClass::ReeLine];
    pub const ALL: [CoverClass; 6] = [
        CoverClass::Y2,
        CoverClass::V1,
        CoverClass::V2,
        CoverClass::W,
        CoverClass::Y1OverK,
        CoverClass::ReeLine,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CoverClass::Y2 => "y2",
            CoverClass::V1 => "v1'",
            CoverClass::V2 => "v2'",
            CoverClass::W => "w",
            CoverClass::Y1OverK => "y1-over-K",
            CoverClass::ReeLine => "ree-line",
        }
    }

    pub fn from_label(s: &str) -> Option<CoverClass> {
        let t = s.trim().to_ascii_lowercase();
        Some(match t.as_str() {
            "y2" | "y_2" => CoverClass::Y2,
            "v1'" | "v1" | "v1p" | "v'_1" => CoverClass::V1,
            "v2'" | "v2" | "v2p" | "v'_2" => CoverClass::V2,
            "w" | "w'" => CoverClass::W,
            "y1-over-k" | "y1" | "y_1-over-k" => CoverClass::Y1OverK,
            "ree-line" | "ree" => CoverClass::ReeLine,
            _ => return None,
        })
    }

    /// Leading right-hand side, for display.
    pub fn rhs(self) -> &'static str {
        match self {
            CoverClass::Y2 => "f2",
            CoverClass::V1 => "g1",
            CoverClass::V2 => "g2",
            CoverClass::W => "2*y1*f2 + f1*f2",
            CoverClass::Y1OverK => "f1",
            CoverClass::ReeLine => "f2",
        }
    }

    pub fn is_over_y1(self) -> bool {
        !matches!(self, CoverClass::Y1OverK | CoverClass::ReeLine)
    }

    /// Position of the leading coordinate among the slots of its chart.
    fn slot(self) -> usize {
        match self {
            CoverClass::Y2 | CoverClass::Y1OverK => 0,
            CoverClass::V1 | CoverClass::ReeLine => 1,
            CoverClass::V2 => 2,
            CoverClass::W => 3,
        }
    }

    /// Number of `F_p`-lines in the class: `q^slot (q-1)/(p-1)`.
    pub fn count(self, params: Params) -> BigInt {
        let q = BigInt::from(params.q());
        q.pow(self.slot() as u32) * BigInt::from(params.line_count())
    }
}

impl fmt::Display for CoverClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Genus of a degree-`p` Artin-Schreier cover with one ramified place,
/// totally ramified with conductor `m`: `2g - 2 = p(2 g_b - 2) + (p-1) m`.
pub fn rh_genus(base_genus: &BigInt, m: u64, p: u32) -> Result<BigInt> {
    if m == 1 || (m >= 2 && (m - 1) % p as u64 == 0) {
        return Err(Error::Parameter(format!("conductor {m}: break must be prime to p = {p}")));
    }
    let p = BigInt::from(p);
    let two_g_minus_2: BigInt = &p * (base_genus * 2 - 2) + (&p - 1) * BigInt::from(m);
    let two_g: BigInt = two_g_minus_2 + BigInt::from(2);
    if two_g.is_odd() {
        return Err(Error::integrity(
            "rh_genus",
            format!("2g = {two_g} is odd (base genus {base_genus}, conductor {m})"),
        ));
    }
    let g: BigInt = two_g / BigInt::from(2);
    if g.is_negative() {
        return Err(Error::integrity("rh_genus", format!("negative genus {g}")));
    }
    Ok(g)
}

/// Garcia-Stichtenoth: for `E/F` elementary abelian of degree `p^N`,
/// `g(E) = Σ g(E_i) - p/(p-1) (p^(N-1) - 1) g(F)`.
pub fn gs_aggregate(pieces: &[(BigInt, BigInt)], base_genus: &BigInt, p: u32, degree_exp: u32) -> Result<BigInt> {
    let pb = BigInt::from(p);
    let total: BigInt = pieces.iter().map(|(_, c)| c.clone()).sum();
    let expected = (pb.clone().pow(degree_exp) - 1) / (&pb - 1);
    if total != expected {
        return Err(Error::Parameter(format!(
            "piece counts sum to {total}, expected (p^{degree_exp}-1)/(p-1) = {expected}"
        )));
    }
    let sum: BigInt = pieces.iter().map(|(g, c)| g * c).sum();
    let out = BigRational::from_integer(sum) - gs_coefficient(p, degree_exp) * BigRational::from_integer(base_genus.clone());
    if !out.is_integer() {
        return Err(Error::integrity("gs_aggregate", format!("non-integral genus {out}")));
    }
    Ok(out.to_integer())
}

/// `p/(p-1) (p^(N-1) - 1)`, exact.
pub fn gs_coefficient(p: u32, degree_exp: u32) -> BigRational {
    let pr = BigRational::from_integer(BigInt::from(p));
    let power = if degree_exp == 0 {
        pr.recip()
    } else {
        BigRational::from_integer(BigInt::from(p).pow(degree_exp - 1))
    };
    &pr / (&pr - BigRational::one()) * (power - BigRational::one())
}

/// Expansions shared by all class computations.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub field: Arc<Field>,
    pub params: Params,
    pub uniformizer: UniformizerData,
    /// `f2, g1, g2, F` over `K(y1)`.
    over_y1: Vec<Expansion>,
    /// `f1, f2` over `K`.
    over_k: Vec<Expansion>,
}

impl Pipeline {
    pub fn new(params: Params) -> Result<Pipeline> {
        let field = Arc::new(Field::new(params.p(), params.n())?);
        let data = build_uniformizer(&field, params)?;
        Self::from_uniformizer(field, data)
    }

    /// Rebuilds the expansions around an existing (e.g. cached) uniformizer.
    pub fn from_uniformizer(field: Arc<Field>, data: UniformizerData) -> Result<Pipeline> {
        data.check()?;
        let params = data.params;
        let tower = Tower::new(&field, params, PresentationKind::Primed);
        let chart = Chart::OverY1(&data);
        let over_y1 = (2..=5)
            .map(|i| expand_at_infinity(tower.relation(i), &chart))
            .collect::<Result<Vec<_>>>()?;
        let base = Chart::BaseK { field: &field, params };
        let over_k = [tower.f1(), tower.f2()]
            .iter()
            .map(|e| expand_at_infinity(e, &base))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pipeline {
            field,
            params,
            uniformizer: data,
            over_y1,
            over_k,
        })
    }

    /// Expansion of `Σ coeffs[j] * rhs_j` over the chart of `class`.
    pub fn line_expansion(&self, class: CoverClass, coeffs: &[Fq]) -> Expansion {
        let pieces = if class.is_over_y1() { &self.over_y1 } else { &self.over_k };
        assert_eq!(coeffs.len(), pieces.len());
        let mut poly = LaurentPoly::zero(&self.field);
        let mut certificate = None;
        for (c, e) in coeffs.iter().zip(pieces) {
            if !c.is_zero() {
                poly = &poly + &e.poly.scale(*c);
                certificate = match (certificate, e.certificate) {
                    (None, c) => c,
                    (Some(a), Some(b)) if b.pole_budget > a.pole_budget => Some(b),
                    (a, _) => a,
                };
            }
        }
        Expansion { poly, certificate }
    }

    /// The line with leading coordinate `γ_1 = 1` and nothing below it.
    pub fn representative(&self, class: CoverClass) -> Vec<Fq> {
        let width = if class.is_over_y1() { 4 } else { 2 };
        let mut v = vec![Fq::ZERO; width];
        v[class.slot()] = Fq::ONE;
        v
    }

    /// Support sizes of the expanded right-hand sides over `K(y1)`.
    pub fn expansion_supports(&self) -> Vec<usize> {
        self.over_y1.iter().map(|e| e.poly.len()).collect()
    }

    pub fn conductor(&self, class: CoverClass, coeffs: &[Fq]) -> ConductorResult {
        conductor_of_expansion(class.label(), &self.line_expansion(class, coeffs))
    }

    fn random_line(&self, class: CoverClass, rng: &mut ChaCha8Rng) -> Vec<Fq> {
        let size = self.field.size() as u32;
        let mut v = self.representative(class);
        for (j, c) in v.iter_mut().enumerate() {
            if j < class.slot() {
                *c = self.field.from_packed(rng.gen_range(0..size)).expect("packed value below q");
            } else if j == class.slot() {
                *c = self.field.from_packed(rng.gen_range(1..size)).expect("packed value below q");
            }
        }
        v
    }

    fn format_line(&self, v: &[Fq]) -> String {
        let parts: Vec<String> = v.iter().map(|c| self.field.format(*c)).collect();
        format!("({})", parts.join(", "))
    }
}

/// Conductor and genus of one class, with its sampled constancy check.
#[derive(Clone, Debug)]
pub struct ClassConductor {
    pub class: CoverClass,
    pub count: BigInt,
    pub conductor: u64,
    pub break_t: u64,
    pub genus: BigInt,
    pub representative: ConductorResult,
    pub samples_checked: usize,
}

/// Seeded stream for one class; independent of thread count.
fn class_rng(seed: u64, class: CoverClass) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(class as u64 + 1);
    rng
}

/// Conductor of the class representative plus `samples` random lines, all
/// required to agree.
pub fn class_conductor(pipeline: &Pipeline, class: CoverClass, samples: usize, seed: u64) -> Result<(ConductorResult, usize)> {
    let rep = pipeline.conductor(class, &pipeline.representative(class));
    check_samples(pipeline, class, &rep, samples, seed)?;
    Ok((rep, samples))
}

/// Compares `samples` seeded random lines of `class` against `rep`.
pub fn check_samples(pipeline: &Pipeline, class: CoverClass, rep: &ConductorResult, samples: usize, seed: u64) -> Result<()> {
    let mut rng = class_rng(seed, class);
    let lines: Vec<Vec<Fq>> = (0..samples).map(|_| pipeline.random_line(class, &mut rng)).collect();
    let found: Vec<u64> = lines.par_iter().map(|v| pipeline.conductor(class, v).conductor).collect();
    if let Some((i, &m)) = found.iter().enumerate().find(|(_, &m)| m != rep.conductor) {
        return Err(Error::ClassInconstancy {
            class: class.label().to_string(),
            line: pipeline.format_line(&lines[i]),
            expected: rep.conductor,
            found: m,
        });
    }
    Ok(())
}

/// All six classes, with genera: over `K` the base genus is 0, over
/// `K(y1)` it is `g(K(y1))` from the `y1-over-K` class.
pub fn class_conductors(pipeline: &Pipeline, samples: usize, seed: u64) -> Result<Vec<ClassConductor>> {
    let reps = CoverClass::ALL
        .par_iter()
        .map(|&c| (c, pipeline.conductor(c, &pipeline.representative(c))))
        .collect();
    class_conductors_from(pipeline, reps, samples, seed)
}

/// Like [`class_conductors`], with representatives already computed.
pub fn class_conductors_from(
    pipeline: &Pipeline,
    reps: Vec<(CoverClass, ConductorResult)>,
    samples: usize,
    seed: u64,
) -> Result<Vec<ClassConductor>> {
    let checks: Vec<Result<()>> = reps
        .par_iter()
        .map(|(c, r)| check_samples(pipeline, *c, r, samples, seed))
        .collect();
    checks.into_iter().collect::<Result<Vec<_>>>()?;
    assemble_classes(pipeline.params, reps.into_iter().map(|(c, r)| (c, r, samples)).collect())
}

/// Fills genera and counts in for computed class conductors (in `ALL` order).
pub fn assemble_classes(params: Params, computed: Vec<(CoverClass, ConductorResult, usize)>) -> Result<Vec<ClassConductor>> {
    let p = params.p();
    let y1 = computed
        .iter()
        .find(|(c, _, _)| *c == CoverClass::Y1OverK)
        .ok_or_else(|| Error::Parameter("y1-over-K class missing".into()))?;
    let g_piece = rh_genus(&BigInt::zero(), y1.1.conductor, p)?;
    let base = gs_aggregate(&[(g_piece, CoverClass::Y1OverK.count(params))], &BigInt::zero(), p, params.n())?;
    computed
        .into_iter()
        .map(|(class, rep, n)| {
            let over = if class.is_over_y1() { base.clone() } else { BigInt::zero() };
            Ok(ClassConductor {
                class,
                count: class.count(params),
                conductor: rep.conductor,
                break_t: rep.break_t,
                genus: rh_genus(&over, rep.conductor, p)?,
                representative: rep,
                samples_checked: n,
            })
        })
        .collect()
}

fn find(classes: &[ClassConductor], c: CoverClass) -> Result<&ClassConductor> {
    classes
        .iter()
        .find(|k| k.class == c)
        .ok_or_else(|| Error::Parameter(format!("class {c} missing")))
}

/// Closed forms as printed, evaluated exactly.
pub mod printed {
    use super::*;

    fn r(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn qs(params: Params) -> (BigRational, BigRational, BigRational) {
        (r(params.p() as i64), r(params.q0() as i64), r(params.q() as i64))
    }

    fn factor(params: Params) -> BigRational {
        let (_, q0, q) = qs(params);
        q / (r(2) * q0)
    }

    pub fn genus_y2(params: Params) -> BigRational {
        let (p, q0, q) = qs(params);
        factor(params) * (&q * &p + &q0 * &p - &q0 - r(1))
    }

    pub fn genus_v1(params: Params) -> BigRational {
        let (p, _, q) = qs(params);
        factor(params) * (r(2) * &q * &p - &q - r(1))
    }

    pub fn genus_v2(params: Params) -> BigRational {
        let (p, q0, q) = qs(params);
        factor(params) * (r(2) * &q * &p + &q0 * &p - &q0 - &q - r(1))
    }

    pub fn genus_w(params: Params) -> BigRational {
        let (p, q0, q) = qs(params);
        factor(params) * (r(2) * &p * &q + r(2) * &p * &q0 - &q0 - &q - r(1))
    }

    pub fn conductor_w(params: Params) -> BigRational {
        let (p, q0, q) = qs(params);
        r(2) + &p * &q0 + r(2) * &q + &p * &q0 * &q
    }

    /// The `(q/2q0)(q-1)` factor read as `g(K(y1))`.
    pub fn genus_base(params: Params) -> BigRational {
        let (_, _, q) = qs(params);
        factor(params) * (q - r(1))
    }

    /// `(q-1)/(p-1) (q/2q0)(q-1)`.
    pub fn subtraction(params: Params) -> BigRational {
        r(params.line_count() as i64) * genus_base(params)
    }

    /// `(q-1)/(p-1) [q^3 g_w + q^2 g_v2 + q g_v1 + g_y2] - subtraction`.
    pub fn genus_f(params: Params) -> BigRational {
        let (_, _, q) = qs(params);
        let t = r(params.line_count() as i64);
        let inner = &q * &q * &q * genus_w(params) + &q * &q * genus_v2(params) + &q * genus_v1(params) + genus_y2(params);
        t * inner - subtraction(params)
    }

    /// `(3/2) q0 (q-1)(q+q0+1)`.
    pub fn ree_genus(params: Params) -> BigRational {
        let (_, q0, q) = qs(params);
        r(3) / r(2) * &q0 * (&q - r(1)) * (&q + &q0 + r(1))
    }

    /// `q + 3 q0 + 1`.
    pub fn ree_break(params: Params) -> BigRational {
        let (_, q0, q) = qs(params);
        q + r(3) * q0 + r(1)
    }

    /// `r + 2` with `r = p q0`.
    pub fn auer_conductor(params: Params) -> BigRational {
        let (p, q0, _) = qs(params);
        p * q0 + r(2)
    }
}

/// `g(F)` under both subtraction readings.
#[derive(Clone, Debug)]
pub struct GenusReport {
    pub params: Params,
    pub classes: Vec<ClassConductor>,
    /// `g(K(y1))`.
    pub base_genus: BigInt,
    pub class_count_total: BigInt,
    /// `Σ count * genus` over the four classes of `F/K(y1)`.
    pub class_sum: BigInt,
    pub subtraction_gs: BigInt,
    pub genus_gs: BigInt,
    pub subtraction_printed: BigRational,
    pub genus_printed_subtraction: BigRational,
    /// `g(K(y1, y2))` by aggregation over `K`.
    pub genus_y1y2: BigInt,
    pub discrepancies: Vec<String>,
}

pub fn genus_of_f(params: Params, classes: Vec<ClassConductor>) -> Result<GenusReport> {
    let p = params.p();
    let y1 = find(&classes, CoverClass::Y1OverK)?;
    let y1_piece = rh_genus(&BigInt::zero(), y1.conductor, p)?;
    let base = gs_aggregate(&[(y1_piece.clone(), y1.count.clone())], &BigInt::zero(), p, params.n())?;

    let pieces: Vec<(BigInt, BigInt)> = CoverClass::OVER_Y1
        .iter()
        .map(|&c| find(&classes, c).map(|k| (k.genus.clone(), k.count.clone())))
        .collect::<Result<_>>()?;
    let class_count_total: BigInt = pieces.iter().map(|(_, c)| c.clone()).sum();
    let class_sum: BigInt = pieces.iter().map(|(g, c)| g * c).sum();
    let degree_exp = 4 * params.n();
    let genus_gs = gs_aggregate(&pieces, &base, p, degree_exp)?;
    let subtraction_gs = &class_sum - &genus_gs;

    let subtraction_printed = printed::subtraction(params);
    let genus_printed_subtraction = BigRational::from_integer(class_sum.clone()) - &subtraction_printed;

    let ree = find(&classes, CoverClass::ReeLine)?;
    let genus_y1y2 = gs_aggregate(
        &[(y1_piece, y1.count.clone()), (ree.genus.clone(), ree.count.clone())],
        &BigInt::zero(),
        p,
        2 * params.n(),
    )?;

    let mut discrepancies = Vec::new();
    if BigRational::from_integer(subtraction_gs.clone()) != subtraction_printed {
        discrepancies.push(format!(
            "subtraction term: aggregation gives {subtraction_gs}, printed term gives {}",
            fmt_rational(&subtraction_printed)
        ));
    }
    let w = find(&classes, CoverClass::W)?;
    let gw = printed::genus_w(params);
    if gw != BigRational::from_integer(w.genus.clone()) {
        discrepancies.push(format!(
            "w genus: printed {} vs Riemann-Hurwitz {}",
            fmt_rational(&gw),
            w.genus
        ));
    }

    Ok(GenusReport {
        params,
        classes,
        base_genus: base,
        class_count_total,
        class_sum,
        subtraction_gs,
        genus_gs,
        subtraction_printed,
        genus_printed_subtraction,
        genus_y1y2,
        discrepancies,
    })
}

/// `|G| = q^6` against `2p/(p-1) g(F)`.
#[derive(Clone, Debug)]
pub struct BigActionReport {
    pub params: Params,
    pub group_order: BigInt,
    pub genus: BigInt,
    /// `2p/(p-1) g(F)`.
    pub threshold: BigRational,
    /// `|G| / g(F)`.
    pub ratio: BigRational,
    pub q0: u64,
    /// `(p-1)|G| > 2p g(F)`.
    pub verdict: bool,
    /// The same comparison with the printed subtraction term.
    pub verdict_printed_subtraction: bool,
}

fn exceeds(params: Params, order: &BigInt, genus: &BigRational) -> bool {
    let p = BigInt::from(params.p());
    let lhs = BigRational::from_integer((&p - 1) * order);
    let rhs = BigRational::from_integer(p * 2) * genus;
    lhs > rhs
}

pub fn verify_big_action(report: &GenusReport) -> BigActionReport {
    let params = report.params;
    let order = BigInt::from(params.q()).pow(6u32);
    let p = BigInt::from(params.p());
    let g = report.genus_gs.clone();
    let gr = BigRational::from_integer(g.clone());
    BigActionReport {
        params,
        threshold: BigRational::new(&p * 2, &p - 1) * &gr,
        ratio: if g.is_zero() { BigRational::zero() } else { BigRational::new(order.clone(), g.clone()) },
        q0: params.q0(),
        verdict: exceeds(params, &order, &gr),
        verdict_printed_subtraction: exceeds(params, &order, &report.genus_printed_subtraction),
        group_order: order,
        genus: g,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditStatus {
    Match,
    Mismatch,
}

/// One closed form evaluated as printed against the computed value.
#[derive(Clone, Debug)]
pub struct AuditRow {
    pub item: &'static str,
    pub formula: &'static str,
    pub printed: BigRational,
    pub computed: BigRational,
    pub status: AuditStatus,
    /// `printed - computed`.
    pub difference: BigRational,
}

pub fn closed_form_audit(report: &GenusReport) -> Result<Vec<AuditRow>> {
    let params = report.params;
    let cls = |c| find(&report.classes, c);
    let int = |v: &BigInt| BigRational::from_integer(v.clone());
    let u = |v: u64| BigRational::from_integer(BigInt::from(v));
    let mut rows = vec![
        ("conductor_w", "2+p*q0+2q+p*q0*q", printed::conductor_w(params), u(cls(CoverClass::W)?.conductor)),
        ("genus_y2", "q/(2q0)*[qp+q0p-q0-1]", printed::genus_y2(params), int(&cls(CoverClass::Y2)?.genus)),
        ("genus_v1'", "q/(2q0)*[2qp-q-1]", printed::genus_v1(params), int(&cls(CoverClass::V1)?.genus)),
        ("genus_v2'", "q/(2q0)*[2qp+q0p-q0-q-1]", printed::genus_v2(params), int(&cls(CoverClass::V2)?.genus)),
        ("genus_w", "q/(2q0)*[2pq+2pq0-q0-q-1]", printed::genus_w(params), int(&cls(CoverClass::W)?.genus)),
        ("genus_K(y1)", "q/(2q0)*(q-1)", printed::genus_base(params), int(&report.base_genus)),
        (
            "subtraction_term",
            "(q-1)/(p-1)*q/(2q0)*(q-1)",
            printed::subtraction(params),
            int(&report.subtraction_gs),
        ),
        ("genus_F", "printed aggregate of printed genera", printed::genus_f(params), int(&report.genus_gs)),
        ("auer_conductor", "r+2, r=p*q0", printed::auer_conductor(params), u(cls(CoverClass::Y1OverK)?.conductor)),
    ];
    if params.p() == 3 {
        rows.push(("ree_genus", "3/2*q0*(q-1)*(q+q0+1)", printed::ree_genus(params), int(&report.genus_y1y2)));
        rows.push(("ree_break", "q+3q0+1", printed::ree_break(params), u(cls(CoverClass::Y2)?.break_t)));
    }
    Ok(rows
        .into_iter()
        .map(|(item, formula, printed, computed)| {
            let difference = &printed - &computed;
            AuditRow {
                item,
                formula,
                status: if difference.is_zero() { AuditStatus::Match } else { AuditStatus::Mismatch },
                printed,
                computed,
                difference,
            }
        })
        .collect())
}

/// Exact decimal when the denominator divides a power of 10, else `a/b`.
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let mut d = r.denom().clone();
    let mut digits = 0u32;
    let ten = BigInt::from(10);
    for f in [2u32, 5] {
        let fb = BigInt::from(f);
        let mut k = 0;
        while (&d % &fb).is_zero() {
            d /= &fb;
            k += 1;
        }
        digits = digits.max(k);
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let scaled = (r * BigRational::from_integer(ten.pow(digits))).to_integer();
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = format!("{:0>width$}", s, width = digits as usize + 1);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

/// Decimal approximation for display only.
pub fn approx(r: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10).pow(places as u32);
    let v = (r * BigRational::from_integer(scale.clone())).round().to_integer();
    let f = v.to_f64().unwrap_or(f64::NAN) / scale.to_f64().unwrap_or(1.0);
    format!("{f:.places$}")
}

impl ClassConductor {
    pub fn to_json(&self, field: &Field) -> Value {
        let rep = &self.representative;
        json!({
            "class": self.class.label(),
            "rhs": self.class.rhs(),
            "count": self.count.to_string(),
            "conductor": self.conductor,
            "break": self.break_t,
            "genus": self.genus.to_string(),
            "geometric": rep.geometric,
            "samples_checked": self.samples_checked,
            "reduced_support_size": rep.reduced.reduced.len(),
            "reduced_pole_orders_top": rep.reduced.pole_orders().iter().rev().take(8).collect::<Vec<_>>(),
            "reduced_leading_coeff": rep.reduced.reduced.valuation().map(|v| field.format(rep.reduced.reduced.coeff(v))),
            "t0_certificate": rep.certificate.map(|c| json!({"pole_budget": c.pole_budget, "t0_valuation": c.t0_valuation})),
        })
    }
}

impl GenusReport {
    pub fn to_json(&self, field: &Field) -> Value {
        json!({
            "classes": self.classes.iter().map(|c| c.to_json(field)).collect::<Vec<_>>(),
            "genus_K_y1": self.base_genus.to_string(),
            "class_count_total": self.class_count_total.to_string(),
            "class_sum": self.class_sum.to_string(),
            "subtraction_gs": self.subtraction_gs.to_string(),
            "genus_F": self.genus_gs.to_string(),
            "subtraction_printed": fmt_rational(&self.subtraction_printed),
            "genus_F_printed_subtraction": fmt_rational(&self.genus_printed_subtraction),
            "genus_K_y1_y2": self.genus_y1y2.to_string(),
            "discrepancies": self.discrepancies,
        })
    }
}

impl BigActionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "group_order": self.group_order.to_string(),
            "genus_F": self.genus.to_string(),
            "threshold": fmt_rational(&self.threshold),
            "ratio": format!("{}/{}", self.ratio.numer(), self.ratio.denom()),
            "ratio_approx": approx(&self.ratio, 6),
            "q0": self.q0,
            "paper_hypothesis": self.params.paper_hypothesis(),
            "big_action": self.verdict,
            "big_action_printed_subtraction": self.verdict_printed_subtraction,
        })
    }
}

impl AuditRow {
    pub fn to_json(&self) -> Value {
        json!({
            "item": self.item,
            "formula": self.formula,
            "printed": fmt_rational(&self.printed),
            "computed": fmt_rational(&self.computed),
            "status": match self.status { AuditStatus::Match => "MATCH", AuditStatus::Mismatch => "MISMATCH" },
            "difference": fmt_rational(&self.difference),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn riemann_hurwitz_examples() {
        assert_eq!(rh_genus(&b(0), 11, 3).unwrap(), b(9));
        assert_eq!(rh_genus(&b(117), 38, 3).unwrap(), b(387));
        assert_eq!(rh_genus(&b(117), 308, 3).unwrap(), b(657));
        assert_eq!(rh_genus(&b(5), 0, 3).unwrap(), b(13));
        assert!(matches!(rh_genus(&b(0), 10, 3), Err(Error::Parameter(_))));
        // p = 3, odd base contribution can't happen; p(2b-2) + (p-1)m is always even for odd p
        assert!(rh_genus(&b(0), 12, 3).is_ok());
    }

    #[test]
    fn aggregation_examples() {
        assert_eq!(gs_aggregate(&[(b(9), b(13))], &b(0), 3, 3).unwrap(), b(117));
        assert_eq!(gs_aggregate(&[(b(9), b(13)), (b(10), b(351))], &b(0), 3, 6).unwrap(), b(3627));
        assert_eq!(gs_aggregate(&[(b(7), b(0))], &b(7), 3, 0).unwrap(), b(7));
        assert!(matches!(gs_aggregate(&[(b(9), b(12))], &b(0), 3, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn class_counts_sum_to_lines_of_fq4() {
        for (p, s) in [(3, 1), (5, 1), (3, 2), (7, 1)] {
            let pr = Params::new(p, s).unwrap();
            let total: BigInt = CoverClass::OVER_Y1.iter().map(|c| c.count(pr)).sum();
            let q = BigInt::from(pr.q());
            assert_eq!(total, (q.pow(4u32) - 1) / BigInt::from(p - 1));
        }
    }

    #[test]
    fn printed_values_3_1() {
        let pr = Params::new(3, 1).unwrap();
        assert_eq!(fmt_rational(&printed::genus_y2(pr)), "387");
        assert_eq!(fmt_rational(&printed::genus_v1(pr)), "603");
        assert_eq!(fmt_rational(&printed::genus_v2(pr)), "630");
        assert_eq!(fmt_rational(&printed::genus_w(pr)), "670.5");
        assert_eq!(fmt_rational(&printed::subtraction(pr)), "1521");
        assert_eq!(fmt_rational(&printed::ree_genus(pr)), "3627");
        assert_eq!(fmt_rational(&printed::conductor_w(pr)), "308");
    }

    #[test]
    fn rational_formatting() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(fmt_rational(&r(27, 2)), "13.5");
        assert_eq!(fmt_rational(&r(-1, 8)), "-0.125");
        assert_eq!(fmt_rational(&r(1, 3)), "1/3");
        assert_eq!(approx(&r(2, 3), 3), "0.667");
    }

    #[test]
    fn pipeline_3_1() {
        let pl = Pipeline::new(Params::new(3, 1).unwrap()).unwrap();
        let classes = class_conductors(&pl, 50, 7).unwrap();
        let m: Vec<u64> = classes.iter().map(|c| c.conductor).collect();
        assert_eq!(m, vec![38, 254, 281, 308, 11, 12]);
        let g: Vec<BigInt> = classes.iter().map(|c| c.genus.clone()).collect();
        assert_eq!(g, vec![b(387), b(603), b(630), b(657), b(9), b(10)]);

        let report = genus_of_f(pl.params, classes).unwrap();
        assert_eq!(report.base_genus, b(117));
        assert_eq!(report.class_count_total, b(265_720));
        assert_eq!(report.genus_gs, b(143_210_574));
        assert_eq!(report.genus_y1y2, b(3627));
        assert_eq!(fmt_rational(&report.subtraction_printed), "1521");

        let big = verify_big_action(&report);
        assert_eq!(big.group_order, b(387_420_489));
        assert_eq!(fmt_rational(&big.threshold), "429631722");
        assert!(!big.verdict);
        assert!(!big.verdict_printed_subtraction);

        let audit = closed_form_audit(&report).unwrap();
        let row = |name: &str| audit.iter().find(|r| r.item == name).unwrap();
        for name in ["conductor_w", "genus_y2", "genus_v1'", "genus_v2'", "genus_K(y1)", "auer_conductor", "ree_genus", "ree_break"] {
            assert_eq!(row(name).status, AuditStatus::Match, "{name}");
        }
        assert_eq!(row("genus_w").status, AuditStatus::Mismatch);
        assert_eq!(fmt_rational(&row("genus_w").difference), "13.5");
        assert_eq!(row("subtraction_term").status, AuditStatus::Mismatch);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let pl = Pipeline::new(Params::new(3, 1).unwrap()).unwrap();
        let mut a = class_rng(99, CoverClass::W);
        let mut c = class_rng(99, CoverClass::W);
        let la: Vec<_> = (0..5).map(|_| pl.random_line(CoverClass::W, &mut a)).collect();
        let lc: Vec<_> = (0..5).map(|_| pl.random_line(CoverClass::W, &mut c)).collect();
        assert_eq!(la, lc);
        assert!(la.iter().all(|v| !v[3].is_zero()));
    }
}
