//! Executable certificates for the invariant-subspace characterizations.
//!
//! Every check computes each side of an equivalence independently and
//! reports whether the computed truth values coincide. Residuals are
//! evaluated on interior masks where truncation cannot produce artifacts.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{
    build_theta, check_isometry, decomposition_projection, principal_subspace, range_subspace,
    ProjectionFamily, ThetaMultiplier,
};
use crate::inner::{Direction, InnerFunction1D, InnerFunctionProd, InnerSeq, DEFAULT_TAIL_EPS};
use crate::linalg::{hstack, spectral_norm, CMat};
use crate::operators::{
    compress_shift, is_doubly_commuting, is_invariant, mult_op_1d, shift_op, wandering_generator,
    Subspace, Wandering, DEFAULT_TOL, TAU_RANK,
};
use crate::space::{BoxTruncation, HardyVector, InteriorMask, MultiIndex, C64};

/// Tolerance for operator identities that hold exactly in the polynomial model.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    True,
    False,
    /// Holds because the quantifier ranges over an empty set.
    Vacuous,
    /// Refuted through an equivalent condition rather than directly.
    FalseByEquivalence,
    /// Neither certified nor refuted.
    NotCertified,
}

impl Truth {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    /// Truth value entering consistency checks; `None` when not certified.
    pub fn value(self) -> Option<bool> {
        match self {
            Truth::True | Truth::Vacuous => Some(true),
            Truth::False | Truth::FalseByEquivalence => Some(false),
            Truth::NotCertified => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub truth: Truth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Condition {
    fn new(name: &str, truth: Truth, residual: Option<f64>) -> Self {
        Condition {
            name: name.into(),
            truth,
            residual,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn from_residual(name: &str, residual: f64, tol: f64) -> Self {
        Condition::new(name, Truth::from_bool(residual <= tol), Some(residual))
    }
}

/// An operator identity that must hold regardless of the conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Identity {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaskSummary {
    pub label: String,
    pub caps: Vec<usize>,
    pub margins: Vec<usize>,
    pub size: usize,
    pub dim: usize,
}

impl MaskSummary {
    fn of(label: &str, mask: &InteriorMask) -> Self {
        MaskSummary {
            label: label.into(),
            caps: mask.space().caps().to_vec(),
            margins: mask.margins().to_vec(),
            size: mask.len(),
            dim: mask.space().dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub conditions: Vec<Condition>,
    pub identities: Vec<Identity>,
    pub consistent: bool,
    pub residuals: Vec<Residual>,
    pub masks: Vec<MaskSummary>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(check: &str) -> Self {
        Verdict {
            check: check.into(),
            conditions: Vec::new(),
            identities: Vec::new(),
            consistent: true,
            residuals: Vec::new(),
            masks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn residual(&mut self, label: impl Into<String>, value: f64) {
        self.residuals.push(Residual {
            label: label.into(),
            value,
        });
    }

    fn identity(&mut self, name: &str, residual: f64, tol: f64) {
        self.identities.push(Identity {
            name: name.into(),
            residual,
            tol,
            holds: residual <= tol,
        });
    }

    /// Marks the verdict inconsistent independently of the condition values.
    fn violation(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
        self.consistent = false;
    }

    /// Consistent iff all certified conditions share one value and every
    /// identity holds.
    fn finish(mut self) -> Self {
        let mut values = self.conditions.iter().filter_map(|c| c.truth.value());
        let agree = match values.next() {
            Some(first) => values.all(|v| v == first),
            None => true,
        };
        if !agree {
            self.notes
                .push("conditions of one equivalence class disagree".into());
        }
        for id in &self.identities {
            if !id.holds {
                self.notes.push(format!(
                    "identity {} violated (residual {:e} > {:e})",
                    id.name, id.residual, id.tol
                ));
            }
        }
        self.consistent = self.consistent && agree && self.identities.iter().all(|i| i.holds);
        self
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Common truth value of the certified conditions, if they agree.
    pub fn common_value(&self) -> Option<bool> {
        let mut values = self.conditions.iter().filter_map(|c| c.truth.value());
        let first = values.next()?;
        values.all(|v| v == first).then_some(first)
    }
}

/// Result of a check: a verdict, or a reported skip when a hypothesis fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Verdict(Verdict),
    Skipped {
        check: String,
        reason: String,
        residuals: Vec<Residual>,
    },
}

impl Outcome {
    pub fn verdict(&self) -> Option<&Verdict> {
        match self {
            Outcome::Verdict(v) => Some(v),
            Outcome::Skipped { .. } => None,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict().is_none_or(|v| v.consistent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Residual threshold separating true from false.
    pub tol: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub tau_rank: f64,
    /// Mask margins on the full `n`-variable box; `None` uses 1 per variable.
    pub margins: Option<Vec<usize>>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: DEFAULT_TOL,
            tau_rank: TAU_RANK,
            margins: None,
        }
    }
}

impl VerifyOptions {
    fn margins(&self, n: usize) -> Result<Vec<usize>> {
        match &self.margins {
            None => Ok(vec![1; n]),
            Some(m) if m.len() == n => Ok(m.clone()),
            Some(m) => Err(Error::LengthMismatch {
                expected: n,
                got: m.len(),
            }),
        }
    }
}

fn nonempty_mask(space: &BoxTruncation, margins: &[usize]) -> Result<InteriorMask> {
    let mask = InteriorMask::new(space, margins)?;
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(mask)
}

/// Variable pairs `(p, q)` over which the Lemma-type residuals range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRange {
    /// All ordered pairs `p != q`.
    Distinct,
    /// Pairs `p < q`.
    Ascending,
}

fn pairs(n: usize, range: PairRange) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            let keep = match range {
                PairRange::Distinct => p != q,
                PairRange::Ascending => p < q,
            };
            if keep {
                out.push((p, q));
            }
        }
    }
    out
}

/// Suprema of `‖P_{S_l} M_p P_j M_q* P_{S_m}‖` (tails) and
/// `‖P_l M_p P_j M_q* P_m‖` (members) over `l, m > j` and the pair range,
/// restricted to the mask columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaResiduals {
    pub tails: f64,
    pub members: f64,
}

pub fn lemma_residuals(
    family: &ProjectionFamily,
    mask: &InteriorMask,
    range: PairRange,
) -> Result<LemmaResiduals> {
    let space = family.space();
    mask.space().check_same(space)?;
    let big = family.len();
    let shifts: Vec<CMat> = (0..space.n())
        .map(|i| shift_op(i, space).map(|op| op.matrix().clone()))
        .collect::<Result<_>>()?;
    let cols = |m: &CMat| crate::linalg::select_columns(m, mask.positions());
    let tails: Vec<CMat> = (1..=big)
        .map(|j| family.tail_space(j).map(|s| s.projection().clone()))
        .collect::<Result<_>>()?;
    let tail_cols: Vec<CMat> = tails.iter().map(cols).collect();
    let member_cols: Vec<CMat> = family
        .members()
        .iter()
        .map(|s| cols(s.projection()))
        .collect();
    let mut out = LemmaResiduals {
        tails: 0.0,
        members: 0.0,
    };
    for j in 0..big {
        let pj = family.members()[j].projection();
        if family.members()[j].rank() == 0 {
            continue;
        }
        for &(p, q) in &pairs(space.n(), range) {
            let core = &shifts[p] * pj * shifts[q].adjoint();
            for m in j + 1..big {
                let right_t = &core * &tail_cols[m];
                let right_m = &core * &member_cols[m];
                for l in j + 1..big {
                    let t = spectral_norm(&(&tails[l] * &right_t));
                    let u = spectral_norm(&(family.members()[l].projection() * &right_m));
                    out.tails = out.tails.max(t);
                    out.members = out.members.max(u);
                }
            }
        }
    }
    Ok(out)
}

/// Doubly commuting, tail-orthogonality and member-orthogonality conditions
/// for a family whose tails are invariant.
pub fn check_lemma31(family: &ProjectionFamily, opts: &VerifyOptions) -> Result<Outcome> {
    let space = family.space();
    let mask = nonempty_mask(space, &opts.margins(space.n())?)?;
    let mut v = Verdict::new("lemma31");
    v.masks.push(MaskSummary::of("family", &mask));

    let tails: Vec<Subspace> = (1..=family.len())
        .map(|j| family.tail_space(j))
        .collect::<Result<_>>()?;
    for (j, t) in tails.iter().enumerate() {
        let inv = is_invariant(t, opts.tol, &mask)?;
        v.residual(format!("S_{} invariant", j + 1), inv.max_residual());
        if !inv.holds {
            return Ok(Outcome::Skipped {
                check: v.check,
                reason: format!("hypothesis failed: tail S_{} is not invariant", j + 1),
                residuals: v.residuals,
            });
        }
    }

    if space.n() < 2 {
        v.conditions.push(
            Condition::new("(i)", Truth::Vacuous, None)
                .with_note("one variable: no pairs of distinct variables"),
        );
        v.conditions
            .push(Condition::new("(ii)", Truth::Vacuous, None));
        v.conditions
            .push(Condition::new("(iii)", Truth::Vacuous, None));
        return Ok(Outcome::Verdict(v.finish()));
    }

    let mut worst = 0.0f64;
    for (j, t) in tails.iter().enumerate() {
        let r = doubly_commuting_residual(t, opts.tol, &mask)?;
        v.residual(format!("S_{} doubly commuting", j + 1), r);
        worst = worst.max(r);
    }
    v.conditions
        .push(Condition::from_residual("(i)", worst, opts.tol));

    let lr = lemma_residuals(family, &mask, PairRange::Distinct)?;
    v.residual("sup tails P_Sl M_p P_j M_q* P_Sm", lr.tails);
    v.residual("sup members P_l M_p P_j M_q* P_m", lr.members);
    v.conditions
        .push(Condition::from_residual("(ii)", lr.tails, opts.tol));
    v.conditions
        .push(Condition::from_residual("(iii)", lr.members, opts.tol));
    Ok(Outcome::Verdict(v.finish()))
}

fn doubly_commuting_residual(s: &Subspace, tol: f64, mask: &InteriorMask) -> Result<f64> {
    if s.rank() == 0 {
        return Ok(0.0);
    }
    Ok(is_doubly_commuting(s, tol, mask)?.max_residual())
}

/// The subspaces `S_j` paired with the inner terms: tails for decreasing
/// terms, heads for increasing ones.
fn paired_spaces(theta: &ThetaMultiplier) -> Result<Vec<Subspace>> {
    let fam = theta.family();
    (1..=fam.len())
        .map(|j| match theta.seq().direction {
            Direction::Decreasing => fam.tail_space(j),
            Direction::Increasing => fam.head_space(j),
        })
        .collect()
}

/// Family whose tails are the paired spaces.
fn oriented_family(theta: &ThetaMultiplier) -> ProjectionFamily {
    match theta.seq().direction {
        Direction::Decreasing => theta.family().clone(),
        Direction::Increasing => theta.family().reversed(),
    }
}

struct Setup {
    range: Subspace,
    full_mask: InteriorMask,
    rest_mask: InteriorMask,
}

fn setup(theta: &ThetaMultiplier, first: &BoxTruncation, opts: &VerifyOptions) -> Result<Setup> {
    let full = theta.full_space(first)?;
    let rest = theta.family().space();
    if rest.n() == 0 {
        return Err(Error::TooFewVariables { needed: 1, got: 0 });
    }
    let margins = opts.margins(full.n())?;
    Ok(Setup {
        range: range_subspace(theta, first, opts.tau_rank)?,
        full_mask: nonempty_mask(&full, &margins)?,
        rest_mask: nonempty_mask(rest, &margins[theta.k()..])?,
    })
}

fn invariance_biconditional(
    name: &str,
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    opts: &VerifyOptions,
    st: &Setup,
) -> Result<Verdict> {
    let mut v = Verdict::new(name);
    v.masks.push(MaskSummary::of("full", &st.full_mask));
    v.masks.push(MaskSummary::of("family", &st.rest_mask));

    let left = is_invariant(&st.range, opts.tol, &st.full_mask)?;
    for (i, r) in left.residuals.iter().enumerate() {
        v.residual(format!("S invariant / z{}", i + 1), *r);
    }
    v.conditions.push(Condition::new(
        "S invariant",
        Truth::from_bool(left.holds),
        Some(left.max_residual()),
    ));

    let label = match theta.seq().direction {
        Direction::Decreasing => "all tails S_j invariant",
        Direction::Increasing => "all heads S_j invariant",
    };
    let mut worst = 0.0f64;
    let mut holds = true;
    for (j, s) in paired_spaces(theta)?.iter().enumerate() {
        let r = is_invariant(s, opts.tol, &st.rest_mask)?;
        v.residual(format!("S_{} invariant", j + 1), r.max_residual());
        worst = worst.max(r.max_residual());
        holds &= r.holds;
    }
    v.conditions
        .push(Condition::new(label, Truth::from_bool(holds), Some(worst)));

    let d = decomposition_projection(theta, first, opts.tau_rank)?;
    v.identity(
        "orthogonal decomposition",
        spectral_norm(&(st.range.projection() - d)),
        IDENTITY_TOL,
    );
    Ok(v)
}

fn require_direction(theta: &ThetaMultiplier, want: Direction) -> Result<()> {
    if theta.seq().direction != want {
        return Err(Error::InvalidSequence(format!(
            "check requires {} terms",
            match want {
                Direction::Decreasing => "decreasing",
                Direction::Increasing => "increasing",
            }
        )));
    }
    Ok(())
}

fn require_one_variable(theta: &ThetaMultiplier) -> Result<()> {
    if theta.k() != 1 {
        return Err(Error::InvalidSequence(format!(
            "check requires one-variable terms, got {}",
            theta.k()
        )));
    }
    Ok(())
}

/// `S` invariant iff every tail is invariant (decreasing one-variable terms).
pub fn check_thm32a(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    require_direction(theta, Direction::Decreasing)?;
    require_one_variable(theta)?;
    let st = setup(theta, first, opts)?;
    Ok(Outcome::Verdict(
        invariance_biconditional("thm32a", theta, first, opts, &st)?.finish(),
    ))
}

/// `S` invariant iff every head is invariant (increasing one-variable terms).
pub fn check_thm33a(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    require_direction(theta, Direction::Increasing)?;
    require_one_variable(theta)?;
    let st = setup(theta, first, opts)?;
    Ok(Outcome::Verdict(
        invariance_biconditional("thm33a", theta, first, opts, &st)?.finish(),
    ))
}

/// The invariance biconditional with terms on `k` variables.
pub fn check_remark_k(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    let st = setup(theta, first, opts)?;
    Ok(Outcome::Verdict(
        invariance_biconditional("remark_k", theta, first, opts, &st)?.finish(),
    ))
}

/// Rudin-type decomposition conditions for decreasing terms.
pub fn check_thm32b(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    witness: Option<&InnerSeq>,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    require_direction(theta, Direction::Decreasing)?;
    part_b("thm32b", theta, first, witness, opts)
}

/// Rudin-type decomposition conditions for increasing terms.
pub fn check_thm33b(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    witness: Option<&InnerSeq>,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    require_direction(theta, Direction::Increasing)?;
    part_b("thm33b", theta, first, witness, opts)
}

fn opposite(d: Direction) -> Direction {
    match d {
        Direction::Increasing => Direction::Decreasing,
        Direction::Decreasing => Direction::Increasing,
    }
}

fn part_b(
    name: &str,
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    witness: Option<&InnerSeq>,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    require_one_variable(theta)?;
    let st = setup(theta, first, opts)?;
    let a = invariance_biconditional(name, theta, first, opts, &st)?;
    let a_true = a.conditions.iter().all(|c| c.truth == Truth::True);
    let mut v = Verdict::new(name);
    v.masks = a.masks;
    v.residuals = a.residuals;
    v.identities = a.identities;
    if !a_true {
        return Ok(Outcome::Skipped {
            check: v.check,
            reason: "hypothesis failed: invariance conditions are not both true".into(),
            residuals: v.residuals,
        });
    }

    let fam = oriented_family(theta);
    let tails: Vec<Subspace> = (1..=fam.len())
        .map(|j| fam.tail_space(j))
        .collect::<Result<_>>()?;
    let m = fam.space().n();

    let (ii, iii, iv) = if m < 2 {
        let note = "no pair 1 <= p < q among the family variables";
        (
            Condition::new("(ii)", Truth::Vacuous, None).with_note(note),
            Condition::new("(iii)", Truth::Vacuous, None).with_note(note),
            Condition::new("(iv)", Truth::Vacuous, None).with_note(note),
        )
    } else {
        let mut worst = 0.0f64;
        for (j, t) in tails.iter().enumerate() {
            let r = doubly_commuting_residual(t, opts.tol, &st.rest_mask)?;
            v.residual(format!("S_{} doubly commuting", j + 1), r);
            worst = worst.max(r);
        }
        let lr = lemma_residuals(&fam, &st.rest_mask, PairRange::Ascending)?;
        v.residual("sup tails P_Sl M_p P_j M_q* P_Sm (p<q)", lr.tails);
        v.residual("sup members P_l M_p P_j M_q* P_m (p<q)", lr.members);
        (
            Condition::from_residual("(ii)", worst, opts.tol),
            Condition::from_residual("(iii)", lr.tails, opts.tol),
            Condition::from_residual("(iv)", lr.members, opts.tol),
        )
    };

    let i = rudin_condition(theta, first, witness, &tails, ii.truth, opts, &st, &mut v)?;
    v.conditions.extend([i, ii, iii, iv]);
    Ok(Outcome::Verdict(v.finish()))
}

#[allow(clippy::too_many_arguments)]
fn rudin_condition(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    witness: Option<&InnerSeq>,
    tails: &[Subspace],
    ii: Truth,
    opts: &VerifyOptions,
    st: &Setup,
    v: &mut Verdict,
) -> Result<Condition> {
    let rest_box = theta.family().space();
    let compare = |chain: &InnerSeq, v: &mut Verdict| -> Result<f64> {
        let r = build_rudin(theta.seq(), chain, first, rest_box, opts.tau_rank)?;
        let res = spectral_norm(&(st.range.projection() - r.projection()));
        v.residual("P_S - P_Rudin", res);
        Ok(res)
    };

    if let Some(w) = witness {
        if w.direction != opposite(theta.seq().direction) || w.len() != theta.seq().len() {
            return Err(Error::InvalidSequence(
                "witness must be the opposite direction with one term per projection".into(),
            ));
        }
        let res = compare(w, v)?;
        return Ok(Condition::from_residual("(i)", res, opts.tol).with_note("witness chain"));
    }

    if ii.value() == Some(false) {
        return Ok(Condition::new("(i)", Truth::FalseByEquivalence, None)
            .with_note("(ii) fails, so no inner sequence reproduces S"));
    }

    // in the paired orientation, tails of the oriented family decrease
    let mut terms: Vec<InnerFunctionProd> = Vec::with_capacity(tails.len());
    for (j, t) in tails.iter().enumerate() {
        match wandering_generator(t, opts.tau_rank)? {
            Wandering::Generator(g) => match monomial_of(&g) {
                Some(k) => terms.push(InnerFunctionProd::monomial(&k.0)),
                None => {
                    return Ok(Condition::new("(i)", Truth::NotCertified, None)
                        .with_note(format!("generator of S_{} is not a monomial", j + 1)))
                }
            },
            Wandering::Rank(r) => {
                v.violation(format!(
                    "wandering subspace of S_{} has rank {r} while (ii) holds",
                    j + 1
                ));
                return Ok(Condition::new("(i)", Truth::NotCertified, None)
                    .with_note("extraction inconclusive"));
            }
            Wandering::Zero => {
                return Ok(Condition::new("(i)", Truth::NotCertified, None)
                    .with_note(format!("S_{} is zero on the truncation", j + 1)))
            }
        }
    }
    if theta.seq().direction == Direction::Increasing {
        // tails of the reversed family are the heads in reverse order
        terms.reverse();
    }
    let chain = InnerSeq::new(opposite(theta.seq().direction), terms);
    if let Err(e) = chain.validate() {
        return Ok(Condition::new("(i)", Truth::NotCertified, None)
            .with_note(format!("extracted generators are not strictly nested: {e}")));
    }
    let res = compare(&chain, v)?;
    let names: Vec<String> = chain.terms.iter().map(|t| t.to_string()).collect();
    Ok(Condition::from_residual("(i)", res, opts.tol)
        .with_note(format!("extracted generators [{}]", names.join(", "))))
}

/// The multi-index of a unit monomial vector, if that is what `g` is.
pub fn monomial_of(g: &HardyVector) -> Option<MultiIndex> {
    let mut found = None;
    for (p, c) in g.coeffs().iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        if found.is_some() || (c - C64::new(1.0, 0.0)).norm() > 1e-12 {
            return None;
        }
        found = Some(p);
    }
    found.map(|p| g.space().index_at(p))
}

/// `⋁_j first_j H^2 (x) rest_j H^2` on `first_box (x) rest_box`, with the
/// two sequences of opposite directions.
pub fn build_rudin(
    first: &InnerSeq,
    rest: &InnerSeq,
    first_box: &BoxTruncation,
    rest_box: &BoxTruncation,
    tau_rank: f64,
) -> Result<Subspace> {
    if first.len() != rest.len() {
        return Err(Error::LengthMismatch {
            expected: first.len(),
            got: rest.len(),
        });
    }
    if first.direction == rest.direction {
        return Err(Error::InvalidSequence(
            "the two sequences must have opposite directions".into(),
        ));
    }
    for s in [first, rest] {
        s.validate()
            .map_err(|v| Error::InvalidSequence(v.to_string()))?;
    }
    for (s, b) in [(first, first_box), (rest, rest_box)] {
        if s.nvars() != b.n() {
            return Err(Error::LengthMismatch {
                expected: b.n(),
                got: s.nvars(),
            });
        }
    }
    let full = first_box.join(rest_box);
    let mut blocks = Vec::with_capacity(first.len());
    for (a, b) in first.terms.iter().zip(&rest.terms) {
        let pa = principal_subspace(a, 0, first_box, tau_rank)?;
        let pb = principal_subspace(b, 0, rest_box, tau_rank)?;
        if pa.rank() > 0 && pb.rank() > 0 {
            blocks.push(pb.frame().kronecker(pa.frame()));
        }
    }
    Ok(Subspace::span(
        &full,
        &hstack(full.dim(), &blocks),
        tau_rank,
    ))
}

/// Isometry of `Theta` on the interior given by the effective degrees.
///
/// With Blaschke terms the truncated Taylor tails leave a residual of the
/// size of the squared l2 tail; that amount is allowed on top of `tol`.
pub fn check_lemma21(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    let op = build_theta(theta, first)?;
    let margins = match &opts.margins {
        Some(m) => {
            if m.len() != op.domain().n() {
                return Err(Error::LengthMismatch {
                    expected: op.domain().n(),
                    got: m.len(),
                });
            }
            m.clone()
        }
        None => op.margins().to_vec(),
    };
    let mask = nonempty_mask(op.domain(), &margins)?;
    let mut tail = 0.0f64;
    for t in &theta.seq().terms {
        let here: f64 = t
            .factors()
            .iter()
            .zip(&margins)
            .map(|(f, &m)| f.l2_tail_sq(m))
            .sum();
        tail = tail.max(here);
    }
    let allowance = opts.tol + 2.0 * tail;
    let iso = check_isometry(&op, &mask, allowance)?;
    let mut v = Verdict::new("lemma21");
    v.masks.push(MaskSummary::of("full", &mask));
    v.residual("Theta* Theta - I", iso.residual);
    v.residual("analytic squared tail", tail);
    v.conditions.push(Condition::new(
        "Theta isometric on interior",
        Truth::from_bool(iso.holds),
        Some(iso.residual),
    ));
    let mut v = v.finish();
    if !iso.holds {
        v.violation("Theta fails to be isometric beyond the truncation allowance");
    }
    Ok(Outcome::Verdict(v))
}

/// Rudin-type subspace data: decreasing one-variable terms on `z_1` paired
/// with increasing terms on the remaining variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RudinSpec {
    pub first: InnerSeq,
    pub rest: InnerSeq,
}

impl RudinSpec {
    pub fn subspace(&self, space: &BoxTruncation, tau_rank: f64) -> Result<Subspace> {
        let (a, b) = space.split(1)?;
        build_rudin(&self.first, &self.rest, &a, &b, tau_rank)
    }

    /// The same data with every first-variable term multiplied by `eta`.
    pub fn times(&self, eta: &InnerFunction1D) -> RudinSpec {
        let eta = InnerFunctionProd::from(eta.clone());
        RudinSpec {
            first: InnerSeq::new(
                self.first.direction,
                self.first
                    .terms
                    .iter()
                    .map(|t| eta.multiply(t).expect("one-variable terms"))
                    .collect(),
            ),
            rest: self.rest.clone(),
        }
    }

    fn check_shape(&self) -> std::result::Result<(), String> {
        if self.first.direction != Direction::Decreasing || self.first.nvars() != 1 {
            return Err("first-variable terms must be decreasing on one variable".into());
        }
        if self.rest.direction != Direction::Increasing {
            return Err("remaining-variable terms must be increasing".into());
        }
        if !self
            .rest
            .terms
            .first()
            .is_some_and(InnerFunctionProd::is_constant)
        {
            return Err("first increasing term is not 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum EtaSearch {
    /// `S = z_1^m S~` (or `S~ = z_1^m S` when `reversed`).
    Found { m: usize, reversed: bool },
    /// No monomial in the searched range works; not a disproof.
    NoneFound,
}

fn projection_gap(a: &Subspace, b: &Subspace) -> f64 {
    spectral_norm(&(a.projection() - b.projection()))
}

/// Smallest `m <= max_m` with `S = z_1^m S~`, also trying `S~ = z_1^m S`.
pub fn find_eta_monomial(
    s: &RudinSpec,
    s_tilde: &RudinSpec,
    space: &BoxTruncation,
    max_m: usize,
    tol: f64,
    tau_rank: f64,
) -> Result<EtaSearch> {
    let sub = s.subspace(space, tau_rank)?;
    let sub_t = s_tilde.subspace(space, tau_rank)?;
    for m in 0..=max_m.min(space.cap(0)) {
        let eta = InnerFunction1D::monomial(m);
        if projection_gap(&sub, &s_tilde.times(&eta).subspace(space, tau_rank)?) <= tol {
            return Ok(EtaSearch::Found { m, reversed: false });
        }
        if projection_gap(&sub_t, &s.times(&eta).subspace(space, tau_rank)?) <= tol {
            return Ok(EtaSearch::Found { m, reversed: true });
        }
    }
    Ok(EtaSearch::NoneFound)
}

/// Unitary equivalence of two Rudin-type subspaces through `eta(z_1)`.
///
/// Checks `S = eta S~` and that `U = M_eta` maps `S~` isometrically into `S`
/// while intertwining the compressed shifts. Without `eta`, searches the
/// monomials `z_1^m`, `m <= max_m`.
pub fn check_thm41(
    s: &RudinSpec,
    s_tilde: &RudinSpec,
    space: &BoxTruncation,
    eta: Option<&InnerFunction1D>,
    max_m: usize,
    opts: &VerifyOptions,
) -> Result<Outcome> {
    for (label, spec) in [("S", s), ("S~", s_tilde)] {
        if let Err(reason) = spec.check_shape() {
            return Ok(Outcome::Skipped {
                check: "thm41".into(),
                reason: format!("hypothesis failed: {label}: {reason}"),
                residuals: Vec::new(),
            });
        }
    }
    let mut v = Verdict::new("thm41");
    let (target, source, eta, note) = match eta {
        Some(e) => (s, s_tilde, e.clone(), "given eta".to_string()),
        None => match find_eta_monomial(s, s_tilde, space, max_m, opts.tol, opts.tau_rank)? {
            EtaSearch::Found { m, reversed: false } => (
                s,
                s_tilde,
                InnerFunction1D::monomial(m),
                format!("search found S = z1^{m} S~"),
            ),
            EtaSearch::Found { m, reversed: true } => (
                s_tilde,
                s,
                InnerFunction1D::monomial(m),
                format!("search found S~ = z1^{m} S"),
            ),
            EtaSearch::NoneFound => {
                v.conditions.push(
                    Condition::new("S = eta S~", Truth::NotCertified, None).with_note(format!(
                        "not equivalent within search class (monomial eta, m <= {max_m})"
                    )),
                );
                v.notes
                    .push("no monomial eta found; this does not disprove equivalence".into());
                return Ok(Outcome::Verdict(v.finish()));
            }
        },
    };
    v.notes.push(note);

    let sub = target.subspace(space, opts.tau_rank)?;
    let sub_t = source.subspace(space, opts.tau_rank)?;
    let shifted = source.times(&eta).subspace(space, opts.tau_rank)?;
    let gap = projection_gap(&sub, &shifted);
    v.residual("P_S - P_(eta S~)", gap);
    let equal = Condition::from_residual("S = eta S~", gap, opts.tol);

    let mut margins = match &opts.margins {
        Some(m) if m.len() == space.n() => m.clone(),
        Some(m) => {
            return Err(Error::LengthMismatch {
                expected: space.n(),
                got: m.len(),
            })
        }
        None => vec![1; space.n()],
    };
    margins[0] = margins[0].max(eta.effective_degree(DEFAULT_TAIL_EPS) + 1);
    let mask = nonempty_mask(space, &margins)?;
    v.masks.push(MaskSummary::of("full", &mask));

    let n_t = sub_t.mask_coordinates(&mask);
    let m_eta = mult_op_1d(&eta, 0, space)?;
    let u = sub.frame().adjoint() * m_eta.matrix() * sub_t.frame();
    let un = &u * &n_t;
    let iso = spectral_norm(&(un.adjoint() * &un - CMat::identity(n_t.ncols(), n_t.ncols())));
    v.residual("U isometric on S~", iso);
    let mut worst = iso;
    for i in 0..space.n() {
        let r_t = compress_shift(&sub_t, i)?.matrix;
        let r = compress_shift(&sub, i)?.matrix;
        let res = spectral_norm(&((&u * r_t - r * &u) * &n_t));
        v.residual(format!("intertwining / z{}", i + 1), res);
        worst = worst.max(res);
    }
    let unitary = Condition::from_residual("M_eta unitary intertwiner", worst, opts.tol);
    // sufficiency only: S = eta S~ forces the intertwiner, not conversely
    if equal.truth == Truth::True && unitary.truth != Truth::True {
        v.violation("S = eta S~ but M_eta fails to intertwine");
    }
    let consistent_before = v.consistent;
    v.conditions.push(equal);
    v.conditions.push(unitary);
    let mut v = v.finish();
    if consistent_before && !v.consistent {
        // an intertwining isometry onto a proper part of S is not a violation
        v.notes.pop();
        v.consistent = true;
    }
    Ok(Outcome::Verdict(v))
}
