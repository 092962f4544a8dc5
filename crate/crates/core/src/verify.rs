//! The axiom suite: table validation, exact skewsymmetry, conformal weights,
//! grading, and the Jacobi identity modulo the relation space.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::algebra::{Degree, Presentation, TMono, TPoly, Violation};
use crate::calculus::{CalcError, Engine};
use crate::formal::{var_name, LPoly};
use crate::pbw::normal_order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Validate,
    Skew,
    Weights,
    Grading,
    Jacobi,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Validate => "validate",
            Check::Skew => "skew",
            Check::Weights => "weights",
            Check::Grading => "grading",
            Check::Jacobi => "jacobi",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "not applicable",
            Status::Skipped => "skipped",
        })
    }
}

/// A nonzero residue localizing a failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub check: Check,
    pub operands: Vec<String>,
    /// Formal-variable monomial the residue belongs to, when localized (e.g. `lambda mu^2`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<String>,
    pub residue: String,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Note {
    pub check: Check,
    pub operands: Vec<String>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub check: Check,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<Note>,
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl Section {
    fn new(check: Check) -> Self {
        Section { check, status: Status::Pass, witnesses: Vec::new(), notes: Vec::new(), elapsed_ms: 0.0 }
    }

    fn with_status(check: Check, status: Status) -> Self {
        Section { status, ..Section::new(check) }
    }

    fn fail(&mut self, operands: Vec<String>, coefficient: Option<String>, residue: String) {
        self.status = Status::Fail;
        self.witnesses.push(Witness { check: self.check, operands, coefficient, residue, status: Status::Fail });
    }

    fn engine_error(&mut self, operands: Vec<String>, e: CalcError) {
        self.fail(operands, None, format!("error: {e}"));
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub name: Option<String>,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| matches!(s.status, Status::Pass | Status::NotApplicable))
    }

    pub fn section(&self, check: Check) -> Option<&Section> {
        self.sections.iter().find(|s| s.check == check)
    }

    pub fn witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.sections.iter().flat_map(|s| s.witnesses.iter())
    }

    /// Stable JSON form; timing lives under `timing_ms` only.
    pub fn to_json(&self) -> Value {
        let timing: BTreeMap<&str, f64> = self.sections.iter().map(|s| (s.check.name(), s.elapsed_ms)).collect();
        serde_json::json!({
            "name": self.name,
            "status": if self.passed() { Status::Pass } else { Status::Fail },
            "checks": self.sections,
            "timing_ms": timing,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("{:<9} {}\n", s.check.name(), s.status));
            for w in &s.witnesses {
                let at = w.coefficient.as_ref().map(|c| format!(" [{c}]")).unwrap_or_default();
                out.push_str(&format!("  ({}){at}: {}\n", w.operands.join(", "), w.residue));
            }
            for n in &s.notes {
                out.push_str(&format!("  note ({}): {}\n", n.operands.join(", "), n.message));
            }
        }
        if self.passed() {
            out.push_str("all checks passed\n");
        } else {
            let failed: Vec<&str> =
                self.sections.iter().filter(|s| s.status == Status::Fail).map(|s| s.check.name()).collect();
            out.push_str(&format!("FAILED: {}\n", failed.join(", ")));
        }
        out
    }
}

fn names(pres: &Presentation, gens: &[u32]) -> Vec<String> {
    gens.iter().map(|&g| pres.generator(g).name.clone()).collect()
}

fn gen_poly(pres: &Presentation, g: u32) -> TPoly {
    TPoly::mono(TMono::single(crate::algebra::RGen::new(g, 0)), pres.space())
}

fn vars_label(e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| if k == 1 { var_name(i) } else { format!("{}^{k}", var_name(i)) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// Table violations that make the recursion unsafe; weight mismatches are
/// reported by [`check_weights`] instead.
pub fn check_validate(pres: &Presentation) -> Section {
    let mut s = Section::new(Check::Validate);
    for v in pres.validate() {
        if matches!(v, Violation::Weight { .. }) {
            continue;
        }
        let operands = match &v {
            Violation::MissingPair { pair }
            | Violation::UnknownGenerator { pair, .. }
            | Violation::BadVariables { pair, .. }
            | Violation::Grading { pair, .. }
            | Violation::Parity { pair, .. } => vec![pair.0.clone(), pair.1.clone()],
            Violation::DuplicateGenerator { name } => vec![name.clone()],
            Violation::NonPositiveDegree { generator, .. } | Violation::NonPositiveWeight { generator, .. } => {
                vec![generator.clone()]
            }
            Violation::Weight { .. } => unreachable!(),
        };
        s.fail(operands, None, v.to_string());
    }
    s
}

/// `sl(a, b; lambda) = 0` on the nose for every generator pair.
pub fn check_skew(engine: &Engine<'_>) -> Section {
    let pres = engine.presentation();
    let mut s = Section::new(Check::Skew);
    let n = pres.generators().len() as u32;
    for a in 0..n {
        for b in a..n {
            let ops = names(pres, &[a, b]);
            match engine.sl(&gen_poly(pres, a), &gen_poly(pres, b)) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => s.fail(ops, None, pres.render_lpoly(&r)),
                Err(e) => s.engine_error(ops, e),
            }
        }
    }
    s
}

/// Weight homogeneity of every table entry; not applicable unless all weights are declared.
pub fn check_weights(pres: &Presentation) -> Section {
    if pres.generators().iter().any(|g| g.weight.is_none()) {
        return Section::with_status(Check::Weights, Status::NotApplicable);
    }
    let mut s = Section::new(Check::Weights);
    for v in pres.validate() {
        if let Violation::Weight { pair, .. } = &v {
            s.fail(vec![pair.0.clone(), pair.1.clone()], None, v.to_string());
        }
    }
    s
}

/// Strict grading of both orientations of every generator pair, including skew-derived ones.
pub fn check_grading(engine: &Engine<'_>) -> Section {
    let pres = engine.presentation();
    let mut s = Section::new(Check::Grading);
    let n = pres.generators().len() as u32;
    for a in 0..n {
        for b in 0..n {
            let ops = names(pres, &[a, b]);
            let bound = pres.generator(a).degree + pres.generator(b).degree;
            match pres.base_bracket(a, b) {
                Ok(v) => {
                    if let Some(d) = pres.lpoly_degree_bound(&v) {
                        if d >= bound {
                            s.fail(ops, None, format!("degree {d} is not below {bound}"));
                        }
                    }
                }
                Err(e) => s.engine_error(ops, e.into()),
            }
        }
    }
    s
}

/// Jacobi identity for every ordered generator triple: each (lambda, mu)
/// coefficient of the jacobiator must normal-order to zero, and the jacobiator
/// must lie strictly below the triple's degree.
pub fn check_jacobi(engine: &Engine<'_>) -> Section {
    let pres = engine.presentation();
    let mut s = Section::new(Check::Jacobi);
    let n = pres.generators().len() as u32;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                jacobi_triple(engine, [a, b, c], &mut s);
            }
        }
    }
    s
}

/// Normal-orders every coefficient of a lambda polynomial.
pub fn reduce_coefficients(engine: &Engine<'_>, j: &LPoly) -> Result<LPoly, CalcError> {
    j.try_map_coeffs(|x| normal_order(engine, x))
}

fn jacobi_triple(engine: &Engine<'_>, t: [u32; 3], s: &mut Section) {
    let pres = engine.presentation();
    let ops = names(pres, &t);
    let j = match engine.jacobiator(&gen_poly(pres, t[0]), &gen_poly(pres, t[1]), &gen_poly(pres, t[2])) {
        Ok(j) => j,
        Err(e) => return s.engine_error(ops, e),
    };
    if j.is_zero() {
        return;
    }
    let bound: Degree = t.iter().map(|&g| pres.generator(g).degree).sum();
    if let Some(d) = pres.lpoly_degree_bound(&j) {
        if d >= bound {
            s.fail(ops.clone(), None, format!("jacobiator has degree {d}, not below {bound}"));
        }
    }
    let mut any = false;
    for (e, x) in j.terms() {
        match normal_order(engine, x) {
            Ok(r) if r.is_zero() => {}
            Ok(r) => {
                any = true;
                s.fail(ops.clone(), Some(vars_label(e)), pres.render_tpoly(&r));
            }
            Err(err) => return s.engine_error(ops, err),
        }
    }
    if !any {
        s.notes.push(Note {
            check: Check::Jacobi,
            operands: ops,
            message: "jacobiator is nonzero in the tensor algebra and vanishes only after normal ordering".into(),
        });
    }
}

/// Runs every check in order, stopping early only if validation fails.
pub fn run_all(pres: &Presentation) -> Report {
    let engine = Engine::new(pres);
    run_all_with(&engine)
}

pub fn run_all_with(engine: &Engine<'_>) -> Report {
    let pres = engine.presentation();
    let mut sections = Vec::new();
    let timed = |f: &dyn Fn() -> Section| {
        let t = Instant::now();
        let mut s = f();
        s.elapsed_ms = t.elapsed().as_secs_f64() * 1e3;
        s
    };
    let v = timed(&|| check_validate(pres));
    let ok = v.status == Status::Pass;
    sections.push(v);
    if ok {
        sections.push(timed(&|| check_skew(engine)));
        sections.push(timed(&|| check_weights(pres)));
        sections.push(timed(&|| check_grading(engine)));
        sections.push(timed(&|| check_jacobi(engine)));
    } else {
        for c in [Check::Skew, Check::Weights, Check::Grading, Check::Jacobi] {
            sections.push(Section::with_status(c, Status::Skipped));
        }
    }
    Report { name: pres.name.clone(), sections }
}
