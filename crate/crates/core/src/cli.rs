//! Command implementations behind the `shiftcouple` binary. Each command
//! returns the JSON document printed on standard output together with the
//! process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (equivalent, converged and verified, decomposed, all checks pass) |
//! | 1 | negative verdict (not equivalent, witness found, verification or axiom failure) |
//! | 2 | iteration budget exhausted before convergence |
//! | 3 | input error |

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::axioms::{self, check_theorem_conditions, run_axiom_suite, AxiomError};
use crate::decomposition::{verify_decomposition, DecompositionReport, Equidecomposition, Failure, Piece, Side};
use crate::format::{parse_json, InputError, LabelMasses, MeasurePair, Payload, Problem, SetPair};
use crate::group::PermutationGroup;
use crate::instances::{malg_quotient, FiniteSet, Measure};
use crate::rational::Rational;
use crate::solver::{check_equivalence, set_equidecompose, tarski_iterate, transport_oracle, OrbitWitness, SetOutcome, SolverError, TarskiConfig};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub document: Value,
    pub exit_code: i32,
}

impl CommandOutput {
    fn new(document: Value, exit_code: i32) -> Self {
        CommandOutput { document, exit_code }
    }

    /// Pretty-printed document with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.document).expect("documents serialize");
        out.push('\n');
        out
    }
}

fn measure_json(mu: &Measure) -> Value {
    let space = mu.space();
    let map: Map<String, Value> = mu.masses().map(|(x, m)| (space.label(x).to_string(), json!(m.to_string()))).collect();
    Value::Object(map)
}

fn points_json(points: impl IntoIterator<Item = usize>, group: &PermutationGroup) -> Value {
    let space = group.space();
    Value::Array(points.into_iter().map(|x| json!(space.label(x))).collect())
}

fn cycles(group: &PermutationGroup, element: usize) -> String {
    let space = group.space();
    group.element(element).cycle_notation_with(|x| space.label(x).to_string())
}

fn orbit_witness_json(w: &OrbitWitness, group: &PermutationGroup) -> Value {
    json!({
        "orbit": points_json(w.orbit.iter().copied(), group),
        "mu": w.mu_mass.to_string(),
        "nu": w.nu_mass.to_string(),
    })
}

fn failure_json(f: &Option<Failure>, group: &PermutationGroup) -> Value {
    let side = |s: &Side| match s {
        Side::Left => "left",
        Side::Right => "right",
    };
    match f {
        None => Value::Null,
        Some(Failure::Mismatch { side: s, point }) => json!({"side": side(s), "point": group.space().label(*point)}),
        Some(Failure::Overlap { side: s, element }) => json!({"side": side(s), "overlapping_element": element}),
    }
}

fn verification_json(report: &DecompositionReport, group: &PermutationGroup) -> Value {
    json!({
        "verified": report.passed(),
        "left": report.left_ok,
        "right": report.right_ok,
        "disjoint": report.disjoint_ok,
        "first_failure": failure_json(&report.first_failure, group),
    })
}

fn measure_pieces_json(d: &Equidecomposition<Measure>, group: &PermutationGroup) -> Value {
    Value::Array(
        d.pieces()
            .iter()
            .map(|(&delta, piece)| json!({"element": delta, "cycles": cycles(group, delta), "mass": measure_json(piece)}))
            .collect(),
    )
}

fn set_pieces_json(d: &Equidecomposition<FiniteSet>, group: &PermutationGroup) -> Value {
    Value::Array(
        d.pieces()
            .iter()
            .map(|(&delta, piece)| {
                json!({"element": delta, "cycles": cycles(group, delta), "points": points_json(piece.members().iter().copied(), group)})
            })
            .collect(),
    )
}

fn measures(problem: &Problem, command: &str) -> Result<MeasurePair, InputError> {
    match &problem.payload {
        Payload::Measures(pair) => Ok(pair.clone()),
        Payload::Sets(_) => Err(InputError::field("mode", format!("`{command}` needs a measures-mode problem"))),
    }
}

fn sets(problem: &Problem, command: &str) -> Result<SetPair, InputError> {
    match &problem.payload {
        Payload::Sets(pair) => Ok(pair.clone()),
        Payload::Measures(_) => Err(InputError::field("mode", format!("`{command}` needs a sets-mode problem"))),
    }
}

fn solver_input_error(e: SolverError) -> InputError {
    match e {
        SolverError::BaseNotInvariant { generator } => {
            InputError::field("base", format!("base measure is not invariant: moved by generator group[{generator}]"))
        }
        other => InputError::general(other.to_string()),
    }
}

/// `check`: do the measures agree on every invariant set?
pub fn cmd_check(problem: &Problem) -> Result<CommandOutput, InputError> {
    let MeasurePair { mu, nu } = measures(problem, "check")?;
    let group = &problem.group;
    let verdict = check_equivalence(&mu, &nu, group).map_err(solver_input_error)?;
    let orbits: Vec<Value> = group.orbits().orbits().iter().map(|o| points_json(o.iter().copied(), group)).collect();
    let document = json!({
        "command": "check",
        "equivalent": verdict.equivalent,
        "orbits": orbits,
        "witness": verdict.witness.as_ref().map(|w| orbit_witness_json(w, group)),
    });
    let code = if verdict.equivalent { EXIT_SUCCESS } else { EXIT_NEGATIVE };
    Ok(CommandOutput::new(document, code))
}

fn not_equivalent(command: &str, w: &OrbitWitness, group: &PermutationGroup) -> CommandOutput {
    CommandOutput::new(
        json!({"command": command, "status": "not_equivalent", "witness": orbit_witness_json(w, group)}),
        EXIT_NEGATIVE,
    )
}

/// `couple`: the iterative peeling construction.
pub fn cmd_couple(problem: &Problem, config: &TarskiConfig) -> Result<CommandOutput, InputError> {
    let MeasurePair { mu, nu } = measures(problem, "couple")?;
    let group = &problem.group;
    let verdict = check_equivalence(&mu, &nu, group).map_err(solver_input_error)?;
    if let Some(w) = &verdict.witness {
        return Ok(not_equivalent("couple", w, group));
    }
    let (d, trace) = tarski_iterate(&mu, &nu, group, config).map_err(solver_input_error)?;
    let expected_left = mu.checked_sub(&trace.residual_a).expect("residual below source");
    let expected_right = nu.checked_sub(&trace.residual_b).expect("residual below target");
    let report = verify_decomposition(&d, &expected_left, &expected_right);
    let status = if trace.converged { "converged" } else { "not_converged" };
    let document = json!({
        "command": "couple",
        "status": status,
        "pieces": measure_pieces_json(&d, group),
        "trace": {
            "passes": trace.passes,
            "steps": trace.steps.len(),
            "residual_mass_a": trace.residual_a.total().to_string(),
            "residual_mass_b": trace.residual_b.total().to_string(),
            "residual_a": measure_json(&trace.residual_a),
            "residual_b": measure_json(&trace.residual_b),
        },
        "verification": verification_json(&report, group),
    });
    let code = match (trace.converged, report.passed()) {
        (true, true) => EXIT_SUCCESS,
        (false, _) => EXIT_NOT_CONVERGED,
        (true, false) => EXIT_NEGATIVE,
    };
    Ok(CommandOutput::new(document, code))
}

/// `oracle`: the direct per-orbit transport construction.
pub fn cmd_oracle(problem: &Problem) -> Result<CommandOutput, InputError> {
    let MeasurePair { mu, nu } = measures(problem, "oracle")?;
    let group = &problem.group;
    let d = match transport_oracle(&mu, &nu, group) {
        Ok(d) => d,
        Err(SolverError::NotEquivalent(w)) => return Ok(not_equivalent("oracle", &w, group)),
        Err(e) => return Err(solver_input_error(e)),
    };
    let report = verify_decomposition(&d, &mu, &nu);
    let document = json!({
        "command": "oracle",
        "status": "exact",
        "pieces": measure_pieces_json(&d, group),
        "verification": verification_json(&report, group),
    });
    let code = if report.passed() { EXIT_SUCCESS } else { EXIT_NEGATIVE };
    Ok(CommandOutput::new(document, code))
}

/// `sets`: decompose `set_a` into `set_b` modulo `base`-null sets, or emit
/// an invariant witness measure.
pub fn cmd_sets(problem: &Problem) -> Result<CommandOutput, InputError> {
    let SetPair { a, b, base } = sets(problem, "sets")?;
    let group = &problem.group;
    match set_equidecompose(&a, &b, group, &base).map_err(solver_input_error)? {
        SetOutcome::Decomposed(d) => {
            let a_class = malg_quotient(&a, &base).representative();
            let b_class = malg_quotient(&b, &base).representative();
            let report = verify_decomposition(&d, &a_class, &b_class);
            let document = json!({
                "command": "sets",
                "status": "decomposed",
                "pieces": set_pieces_json(&d, group),
                "verification": verification_json(&report, group),
            });
            let code = if report.passed() { EXIT_SUCCESS } else { EXIT_NEGATIVE };
            Ok(CommandOutput::new(document, code))
        }
        SetOutcome::Witness(w) => {
            let document = json!({
                "command": "sets",
                "status": "witness",
                "witness": {
                    "measure": measure_json(&w),
                    "a": w.eval_set(&a).to_string(),
                    "b": w.eval_set(&b).to_string(),
                },
            });
            Ok(CommandOutput::new(document, EXIT_NEGATIVE))
        }
    }
}

#[derive(Debug, Deserialize)]
struct PieceDoc {
    element: usize,
    #[serde(default)]
    mass: Option<LabelMasses>,
    #[serde(default)]
    points: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
struct TraceDoc {
    residual_a: LabelMasses,
    residual_b: LabelMasses,
}

#[derive(Debug, Deserialize)]
struct MeasureWitnessDoc {
    orbit: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct SetWitnessDoc {
    measure: LabelMasses,
}

#[derive(Debug, Deserialize)]
struct OutputDoc {
    command: String,
    #[serde(default)]
    status: Option<String>,
    #[serde(default)]
    pieces: Vec<PieceDoc>,
    #[serde(default)]
    trace: Option<TraceDoc>,
    #[serde(default)]
    witness: Option<Value>,
}

fn masses_to_measure(problem: &Problem, field: &str, masses: &LabelMasses) -> Result<Measure, InputError> {
    let pairs = masses
        .iter()
        .map(|(label, m)| {
            problem
                .space
                .index_of(label)
                .map(|x| (x, m.clone()))
                .map_err(|_| InputError::field(format!("{field}.{label}"), format!("unknown point label {label:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Measure::from_masses(&problem.space, pairs))
}

fn labels_to_set(problem: &Problem, field: &str, labels: &[String]) -> Result<FiniteSet, InputError> {
    let members = labels
        .iter()
        .map(|label| {
            problem
                .space
                .index_of(label)
                .map_err(|_| InputError::field(field, format!("unknown point label {label:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FiniteSet::from_indices(&problem.space, members))
}

fn assemble_doc<P: Piece>(
    group: &PermutationGroup,
    zero: &P,
    pieces: &[PieceDoc],
    piece: impl Fn(usize, &PieceDoc) -> Result<P, InputError>,
) -> Result<Equidecomposition<P>, InputError> {
    let mut map = BTreeMap::new();
    for (i, p) in pieces.iter().enumerate() {
        if p.element >= group.order() {
            return Err(InputError::field(format!("pieces[{i}].element"), format!("no group element {}", p.element)));
        }
        if map.insert(p.element, piece(i, p)?).is_some() {
            return Err(InputError::field(format!("pieces[{i}].element"), format!("repeated element {}", p.element)));
        }
    }
    Equidecomposition::assemble(group, zero, map).map_err(|e| InputError::general(e.to_string()))
}

fn verified(checks: Value, ok: bool) -> CommandOutput {
    let document = json!({"command": "verify", "verified": ok, "checks": checks});
    CommandOutput::new(document, if ok { EXIT_SUCCESS } else { EXIT_NEGATIVE })
}

/// `verify`: re-checks a document emitted by `check`, `couple`, `oracle`
/// or `sets` against its problem.
pub fn cmd_verify(problem: &Problem, document: &str) -> Result<CommandOutput, InputError> {
    let doc: OutputDoc = parse_json(document)?;
    let group = &problem.group;
    let witness_only = doc.status.as_deref() == Some("not_equivalent") || doc.command == "check";

    match (&problem.payload, doc.status.as_deref()) {
        (Payload::Measures(MeasurePair { mu, nu }), _) if witness_only => {
            let Some(w) = doc.witness.filter(|w| !w.is_null()) else {
                let equivalent = check_equivalence(mu, nu, group).map_err(solver_input_error)?.equivalent;
                return Ok(verified(json!({"equivalent": equivalent}), equivalent));
            };
            let w: MeasureWitnessDoc = serde_json::from_value(w).map_err(|e| InputError::field("witness", e.to_string()))?;
            let orbit = labels_to_set(problem, "witness.orbit", &w.orbit)?;
            let is_orbit = group.orbits().orbits().iter().any(|o| o.iter().eq(orbit.members().iter()));
            let differs = mu.eval_set(&orbit) != nu.eval_set(&orbit);
            Ok(verified(json!({"is_orbit": is_orbit, "masses_differ": differs}), is_orbit && differs))
        }
        (Payload::Measures(MeasurePair { mu, nu }), _) => {
            let d = assemble_doc(group, mu, &doc.pieces, |i, p| {
                let masses = p.mass.as_ref().ok_or_else(|| InputError::field(format!("pieces[{i}].mass"), "missing"))?;
                masses_to_measure(problem, &format!("pieces[{i}].mass"), masses)
            })?;
            let (source, target) = match &doc.trace {
                Some(t) => {
                    let ra = masses_to_measure(problem, "trace.residual_a", &t.residual_a)?;
                    let rb = masses_to_measure(problem, "trace.residual_b", &t.residual_b)?;
                    match (mu.checked_sub(&ra), nu.checked_sub(&rb)) {
                        (Ok(s), Ok(t)) => (s, t),
                        _ => return Ok(verified(json!({"residuals_below_inputs": false}), false)),
                    }
                }
                None => (mu.clone(), nu.clone()),
            };
            let report = verify_decomposition(&d, &source, &target);
            Ok(verified(verification_json(&report, group), report.passed()))
        }
        (Payload::Sets(SetPair { a, b, base }), Some("witness")) => {
            let w = doc.witness.ok_or_else(|| InputError::field("witness", "missing"))?;
            let w: SetWitnessDoc = serde_json::from_value(w).map_err(|e| InputError::field("witness", e.to_string()))?;
            let nu = masses_to_measure(problem, "witness.measure", &w.measure)?;
            let invariant = group.first_generator_moving(&nu).is_none();
            let absolutely_continuous = nu.masses().all(|(x, _)| base.mass(x).is_positive());
            let separates = nu.eval_set(a) != nu.eval_set(b);
            let checks = json!({"invariant": invariant, "absolutely_continuous": absolutely_continuous, "separates": separates});
            Ok(verified(checks, invariant && absolutely_continuous && separates))
        }
        (Payload::Sets(SetPair { a, b, base }), _) => {
            let zero = FiniteSet::empty(&problem.space);
            let d = assemble_doc(group, &zero, &doc.pieces, |i, p| {
                let points = p.points.as_ref().ok_or_else(|| InputError::field(format!("pieces[{i}].points"), "missing"))?;
                labels_to_set(problem, &format!("pieces[{i}].points"), points)
            })?;
            let report = verify_decomposition(
                &d,
                &malg_quotient(a, base).representative(),
                &malg_quotient(b, base).representative(),
            );
            Ok(verified(verification_json(&report, group), report.passed()))
        }
    }
}

/// `axioms`: the seeded axiom suite on a registered instance, plus the
/// theorem-condition checks when an action is supplied.
pub fn cmd_axioms(instance: &str, seed: u64, cases: usize, action: Option<&Problem>) -> Result<CommandOutput, InputError> {
    let report = run_axiom_suite(instance, seed, cases).map_err(|e| match e {
        AxiomError::UnknownInstance(name) => InputError::field(
            "instance",
            format!("unknown instance {name:?}; expected one of {}", axioms::INSTANCE_NAMES.join(", ")),
        ),
        other => InputError::general(other.to_string()),
    })?;
    let conditions = action.map(|p| check_theorem_conditions(&p.group, seed, cases));
    let ok = report.passed() && conditions.as_ref().is_none_or(|c| c.passed());
    let mut document = json!({
        "command": "axioms",
        "passed": ok,
        "report": report,
    });
    if let Some(c) = conditions {
        document["theorem_conditions"] = json!(c);
    }
    Ok(CommandOutput::new(document, if ok { EXIT_SUCCESS } else { EXIT_NEGATIVE }))
}

/// Parses an `--epsilon` value.
pub fn parse_epsilon(text: &str) -> Result<Rational, InputError> {
    text.parse().map_err(|e: crate::rational::ParseRationalError| InputError::field("--epsilon", e.to_string()))
}
