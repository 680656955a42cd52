//! Acceptance gate: one PASS/FAIL line per criterion. Exits non-zero when any
//! criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use forestjudge::fixtures::{self, *};
use forestjudge::store::{export_script, find_suspects, merge, pos_propagate, replay, update_priors, SuspectConfig};
use forestjudge::{
    build_incidence, propagate, AutoConfig, ClassMap, Corpus, HeadTable, PriorTable, Provenance, RecordStatus,
    SentenceRecord, Session, SessionState, StoreConfig, Value,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NARRATIVE_LIMIT: Duration = Duration::from_secs(1);
const RANDOMIZED_LIMIT: Duration = Duration::from_secs(30);
const ORACLE_CASES: usize = 1_000;
const ORACLE_MAX_ANALYSES: usize = 12;
const ORACLE_MAX_PROPERTIES: usize = 20;
const ORDER_FIXTURES: usize = 200;
const ORDER_PERMUTATIONS: usize = 20;
const SEED: u64 = 0x5EED_F0E5;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn session_for(text_id: &str, text: &str) -> (SentenceRecord, Session) {
    let (s, a) = fixtures::parse_text(text_id, text);
    let r = SentenceRecord::new(s, a).unwrap();
    let session = r.session().unwrap();
    (r, session)
}

fn undecided_displayed(s: &Session) -> BTreeSet<String> {
    s.incidence()
        .displayed_discriminants(false)
        .into_iter()
        .filter(|p| s.value_of(&p.key).is_none())
        .map(|p| p.key.clone())
        .collect()
}

fn b6_narrative() -> Outcome {
    let (s, a) = fixtures::b6();
    ensure!(a.len() == 6, "{} analyses", a.len());
    let inc = Arc::new(build_incidence(&a, &s, &HeadTable::new()).unwrap());
    let fresh = Session::new(inc).unwrap();
    let one = fresh.judge(B6_NP, Value::Good).unwrap();
    ensure!(one.candidates().len() == 2, "{} candidates after NP", one.candidates().len());
    let senses: BTreeSet<String> = [B6_PROVIDE, B6_FLYTO].iter().map(|s| s.to_string()).collect();
    ensure!(undecided_displayed(&one) == senses, "undecided after NP: {:?}", undecided_displayed(&one));
    let two = one.judge(B6_PROVIDE, Value::Good).unwrap();
    ensure!(two.candidates().len() == 1, "{} candidates after sense", two.candidates().len());
    ensure!(
        two.value_of(B6_FLYTO) == Some((Value::Bad, Provenance::Derived)),
        "fly-to is {:?}",
        two.value_of(B6_FLYTO)
    );
    Ok(format!("6 analyses; candidates 6 -> {} -> {}", one.candidates().len(), two.candidates().len()))
}

fn f154_counts() -> Outcome {
    let fresh = Session::new(Arc::new(fixtures::f154())).unwrap();
    ensure!(fresh.candidates().len() == 154, "{} analyses", fresh.candidates().len());
    let one = fresh.judge(F154_NP, Value::Good).unwrap();
    let two = one.judge(F154_REL, Value::Good).unwrap();
    let counts = (one.candidates().len(), two.candidates().len());
    ensure!(counts == (20, 2), "counts {counts:?}");
    Ok("candidates 154 -> 20 -> 2".into())
}

fn w14_strategies() -> Outcome {
    let (s, a) = fixtures::w14();
    ensure!(a.len() == 14, "{} analyses", a.len());
    let inc = Arc::new(build_incidence(&a, &s, &HeadTable::new()).unwrap());
    let strategies: [(&str, &[(&str, Value)]); 3] = [
        ("approve constituents", &[(W14_NP_ALL, Value::Good), (W14_NP_REL, Value::Good), (W14_PROVIDE, Value::Good)]),
        ("approve and reject", &[(W14_NP_ALL, Value::Good), (W14_VP_LONG, Value::Bad), (W14_PROVIDE, Value::Good)]),
        ("select a triple", &[(W14_FLIGHT_ON_WEDNESDAY, Value::Good), (W14_PROVIDE, Value::Good)]),
    ];
    let mut used = Vec::new();
    for (name, steps) in strategies {
        ensure!(steps.len() <= 3, "{name} uses {} judgments", steps.len());
        let mut session = Session::new(inc.clone()).unwrap();
        for (k, v) in steps {
            session = session.judge(k, *v).unwrap();
        }
        let c: Vec<usize> = session.candidates().iter().collect();
        ensure!(c == [0], "{name} leaves {c:?}");
        used.push(steps.len().to_string());
    }
    Ok(format!("14 analyses; strategies isolate one reading in {} judgments", used.join("/")))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = 0;
    for case in 0..ORACLE_CASES {
        let n = rng.gen_range(1..=ORACLE_MAX_ANALYSES);
        let inc = common::random_incidence(&mut rng, n, ORACLE_MAX_PROPERTIES);
        let judgments = common::random_assertions(&mut rng, &inc, 8);
        // every prefix of the sequence is a state the annotator passes through
        for end in 0..=judgments.len() {
            let assertions = common::latest(&judgments[..end]);
            let got = propagate(&assertions, &inc);
            let want = common::fixpoint(&assertions, &inc);
            let same = (got.state == SessionState::Conflict) == want.conflict
                && got.candidates.iter().collect::<BTreeSet<_>>() == want.candidates
                && got.derived == want.derived;
            ensure!(same, "case {case}, prefix {end}: closure differs from oracle");
            checks += 1;
        }
    }
    Ok(format!("{ORACLE_CASES} incidences, {checks} closures, 100% agreement"))
}

fn order_and_supersession() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut perms = 0;
    for case in 0..ORDER_FIXTURES {
        let n = rng.gen_range(1..=ORACLE_MAX_ANALYSES);
        let inc = Arc::new(common::random_incidence(&mut rng, n, ORACLE_MAX_PROPERTIES));
        let set: Vec<_> = common::latest(&common::random_assertions(&mut rng, &inc, 8)).into_iter().collect();
        let run = |js: &[(String, Value)]| {
            js.iter().fold(Session::new(inc.clone()).unwrap(), |s, (k, v)| s.judge(k, *v).unwrap())
        };
        let base = run(&set);
        for _ in 0..ORDER_PERMUTATIONS {
            let mut p = set.clone();
            rand::seq::SliceRandom::shuffle(p.as_mut_slice(), &mut rng);
            ensure!(run(&p) == base, "case {case}: permutation changes the session");
            perms += 1;
        }
        for (k, v) in &set {
            let once = Session::new(inc.clone()).unwrap().judge(k, *v).unwrap();
            let flipped = Session::new(inc.clone()).unwrap().judge(k, v.flipped()).unwrap().judge(k, *v).unwrap();
            ensure!(once == flipped, "case {case}: flip on {k} not superseded");
        }
    }
    Ok(format!("{ORDER_FIXTURES} fixtures, {perms} permutations identical; flips superseded"))
}

fn merge_preservation() -> Outcome {
    let (s, a) = fixtures::b6();
    let mut old = SentenceRecord::new(s.clone(), a.clone()).unwrap();
    for (k, v) in [(B6_ADVP, Value::Bad), (B6_NP, Value::Good), (B6_PROVIDE, Value::Good)] {
        old.judge(k, v, Provenance::User).unwrap();
    }
    old.mark_ok().unwrap();
    let (same, report) = merge(&old, &s, a).unwrap();
    ensure!(report.transferred.len() == 3 && report.vanished.is_empty(), "identity merge lost judgments");
    ensure!(same.session().unwrap() == old.session().unwrap(), "identity merge changed the session");
    let (s2, a2) = fixtures::b6_minus_adv();
    let (_, report) = merge(&old, &s2, a2).unwrap();
    let vanished: Vec<&str> = report.vanished.iter().map(|j| j.target.as_str()).collect();
    ensure!(vanished == [B6_ADVP], "vanished {vanished:?}");
    ensure!(report.transferred.iter().any(|j| j.target == B6_NP), "NP judgment not transferred");
    Ok(format!("identity 3/3 kept; reduced grammar: {} transferred, 1 archived", report.transferred.len()))
}

fn key_starting(r: &SentenceRecord, prefix: &str) -> String {
    r.incidence().properties().iter().find(|p| p.display.starts_with(prefix)).unwrap().key.clone()
}

fn pos_propagation() -> Outcome {
    let records = fixtures::TWIN_TEXTS
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let (s, a) = fixtures::parse_text(&format!("t{i}"), t);
            SentenceRecord::new(s, a).unwrap()
        })
        .collect();
    let mut c = Corpus::from_files("unused", StoreConfig::default(), vec![]).unwrap();
    c.add_records(records, "corpus").unwrap();
    let untouched = c.record("t2").unwrap().clone();
    let src = c.record_mut("t0").unwrap();
    let k = key_starting(src, "flight to");
    src.judge(&k, Value::Good, Provenance::User).unwrap();
    src.mark_ok().unwrap();
    let report = pos_propagate(&mut c, "t0").unwrap();
    let want = c.record("t0").unwrap().session().unwrap().candidates().len();
    let got = c.record("t1").unwrap().session().unwrap().candidates().len();
    ensure!(report.updated.len() == 1 && report.updated[0].id == "t1", "updated {:?}", report.updated);
    ensure!(got == want, "target has {got} candidates, source {want}");
    ensure!(c.record("t2").unwrap() == &untouched, "different tag sequence was modified");
    Ok(format!("twin reaches {got} candidate(s) like the source; other sequence untouched"))
}

fn auto_resolution() -> Outcome {
    let classes = ClassMap::bundled();
    let mut priors = PriorTable::new();
    priors.set("t:show:-to:cc_city", 0, 40);
    let (r, fresh) = session_for("ny", "Show me flights to New York");
    let show = key_starting(&r, "show -to");
    let flight = key_starting(&r, "flight to");
    let auto = fresh.auto_resolve(&priors, &classes, &AutoConfig::default());
    ensure!(auto.value_of(&show) == Some((Value::Bad, Provenance::Auto)), "show-to is {:?}", auto.value_of(&show));
    ensure!(
        auto.value_of(&flight) == Some((Value::Good, Provenance::Derived)),
        "consequence not applied: {:?}",
        auto.value_of(&flight)
    );
    let over = auto.judge(&show, Value::Good).unwrap();
    ensure!(over.value_of(&show) == Some((Value::Good, Provenance::User)), "user override lost");
    ensure!(over.value_of(&flight) == Some((Value::Bad, Provenance::Derived)), "closure not recomputed");
    Ok("opens auto-bad with consequence derived; override wins".into())
}

fn suspect_detection() -> Outcome {
    let classes = ClassMap::bundled();
    let contrary = 6;
    let mut records = Vec::new();
    for (i, city) in SUSPECT_CITIES.iter().enumerate() {
        let (s, a) = fixtures::parse_text(&format!("q{i:02}"), &format!("show me flights to {city}"));
        let mut r = SentenceRecord::new(s, a).unwrap();
        let k = key_starting(&r, if i == contrary { "show -to" } else { "flight to" });
        r.judge(&k, Value::Good, Provenance::User).unwrap();
        r.mark_ok().unwrap();
        records.push(r);
    }
    let priors = update_priors(&records, &classes).unwrap();
    let suspects = find_suspects(&records, &priors, &classes, &SuspectConfig::default()).unwrap();
    let ids: Vec<&str> = suspects.iter().map(|s| s.id.as_str()).collect();
    ensure!(ids.first() == Some(&"q06"), "suspects {ids:?}");
    Ok(format!("{} of 10 flagged, contradictory sentence first", ids.len()))
}

fn log_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let fresh = || {
        let mut c = Corpus::from_files("unused", StoreConfig::default(), vec![]).unwrap();
        let records = [("b6", B6_TEXT), ("w14", W14_TEXT), ("d", "show me flights to Denver")]
            .iter()
            .map(|(id, t)| {
                let (s, a) = fixtures::parse_text(id, t);
                SentenceRecord::new(s, a).unwrap()
            })
            .collect();
        c.add_records(records, "corpus").unwrap();
        c
    };
    let mut first = fresh();
    let script = format!(
        "b6\t{B6_ADVP}\tgood\nb6\t{B6_ADVP}\tbad\nb6\t{B6_NP}\tgood\nb6\t{B6_PROVIDE}\tgood\n\
         w14\t{W14_NP_ALL}\tgood\nw14\t!reset\nw14\t{W14_FLIGHT_ON_WEDNESDAY}\tgood\n\
         d\t!status\tnot-ok\tother\tcomment\n"
    );
    replay(&mut first, &script).unwrap();
    first.save_to(dir.path().join("first")).unwrap();
    let mut second = fresh();
    replay(&mut second, &export_script(&first)).unwrap();
    second.save_to(dir.path().join("second")).unwrap();
    for f in first.files() {
        let name = format!("{}.fjc", f.id);
        let a = std::fs::read(dir.path().join("first").join(&name)).unwrap();
        let b = std::fs::read(dir.path().join("second").join(&name)).unwrap();
        ensure!(a == b, "{name} differs after replay");
    }
    ensure!(first.record("b6").unwrap().status() == RecordStatus::Ok, "b6 not ok after replay");
    Ok(format!("{} file(s) byte-identical", first.files().len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("b6-narrative", b6_narrative, NARRATIVE_LIMIT),
        ("f154-counts", f154_counts, NARRATIVE_LIMIT),
        ("w14-strategies", w14_strategies, NARRATIVE_LIMIT),
        ("oracle-equivalence", oracle_equivalence, RANDOMIZED_LIMIT),
        ("order-and-supersession", order_and_supersession, RANDOMIZED_LIMIT),
        ("merge-preservation", merge_preservation, NARRATIVE_LIMIT),
        ("pos-propagation", pos_propagation, NARRATIVE_LIMIT),
        ("auto-resolution", auto_resolution, NARRATIVE_LIMIT),
        ("suspect-detection", suspect_detection, NARRATIVE_LIMIT),
        ("log-determinism", log_determinism, NARRATIVE_LIMIT),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_message(&e))));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name:<24} {detail} ({:.1} ms)", elapsed.as_secs_f64() * 1e3),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {why}");
            }
        }
    }
    println!("{} of {} criteria passed", 10 - failed, 10);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_message(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}
