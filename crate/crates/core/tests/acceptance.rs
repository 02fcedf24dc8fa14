//! One test per acceptance criterion. Each prints a single summary line.

mod support;

use std::collections::BTreeMap;

use support::{naive_exists, random_graph};
use vmagic::abelian::{enumerate_abelian_groups, CayleyTable, GroupSpec};
use vmagic::characterize::{
    classify_group_vertex_magic, construct_labeling, predict, ClassifyVerdict, Outcome, Rule,
};
use vmagic::families::{build, enumerate_connected, FamilyId, FamilyInstance};
use vmagic::graphcore::{
    classify_vertices, degrees_same_parity, is_generalized_sun, neighborhood_obstruction,
    sun_cycle, Graph,
};
use vmagic::labeling::verify_magic;
use vmagic::solver::{exists_magic, EmpiricalVerdict, SolveStatus, Solver};
use vmagic::workbench::{
    audit_families, catalog, crosscheck, AuditException, DiscrepancyLedger, Grid, OpenQuestion,
};

fn report(criterion: u32, title: &str, failures: &[String], detail: String) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {criterion} [{status}] {title}: {detail}");
    for f in failures.iter().take(20) {
        println!("    {f}");
    }
    assert!(
        failures.is_empty(),
        "criterion {criterion} failed with {} problems",
        failures.len()
    );
}

fn grid() -> Vec<(FamilyInstance, Graph)> {
    Grid::standard()
        .instances()
        .into_iter()
        .map(|i| {
            let g = build(&i).unwrap().graph;
            (i, g)
        })
        .collect()
}

fn group(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

/// Catalog of order <= 8 plus the two groups exercised beyond it.
fn extended_catalog() -> Vec<GroupSpec> {
    let mut groups = catalog(8);
    groups.push(group("Z9"));
    if !groups.contains(&group("Z2+Z2+Z2")) {
        groups.push(group("Z2+Z2+Z2"));
    }
    groups
}

#[test]
fn criterion_1_oracle_matches_brute_force() {
    let groups = enumerate_abelian_groups(5);
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (inst, g) in grid().iter().filter(|(_, g)| g.n() <= 8) {
        for a in &groups {
            pairs += 1;
            let pruned = exists_magic(g, a).unwrap();
            if (pruned.status == SolveStatus::Witness) != naive_exists(g, a) {
                failures.push(format!("{inst} over {a}: solver says {:?}", pruned.status));
            }
            if let Some((l, _)) = &pruned.witness {
                if verify_magic(g, l).unwrap().is_none() {
                    failures.push(format!("{inst} over {a}: witness does not verify"));
                }
            }
        }
    }
    report(
        1,
        "pruned search equals full enumeration",
        &failures,
        format!("{pairs} (instance, group) pairs, n <= 8, |A| <= 5"),
    );
}

/// Families whose propositions must produce no ledger entries.
const CLEAN: &[FamilyId] = &[
    FamilyId::Cycle,
    FamilyId::Fig1G1,
    FamilyId::G2,
    FamilyId::M3,
    FamilyId::M6,
    FamilyId::M7,
    FamilyId::M8,
    FamilyId::M11,
    FamilyId::M13,
];

#[test]
fn criterion_2_theorems_match_oracle() {
    let instances = Grid::standard().instances();
    let groups: Vec<GroupSpec> = catalog(8).into_iter().filter(|a| a.order() >= 3).collect();
    let records = crosscheck(&instances, &groups);
    let ledger = DiscrepancyLedger::from_records(&records);
    let mut failures: Vec<String> = ledger
        .unexplained()
        .iter()
        .map(|r| {
            format!(
                "unexplained: {} over {} ({} vs {:?})",
                r.instance, r.group, r.theorem, r.oracle
            )
        })
        .collect();
    failures.extend(ledger.recheck());
    for e in &ledger.entries {
        let family = e.record.family_instance().family;
        if CLEAN.contains(&family) {
            failures.push(format!(
                "clean family {family} disagrees: {} over {}",
                e.record.instance, e.record.group
            ));
        }
    }
    let compared: Vec<_> = records.iter().filter(|r| r.agreement.is_some()).collect();
    let outside = compared
        .iter()
        .filter(|r| !OpenQuestion::classify(r).is_some_and(OpenQuestion::is_quarantined))
        .collect::<Vec<_>>();
    let agree_outside = outside.iter().filter(|r| r.agreement == Some(true)).count();
    let mut by_tag: BTreeMap<&str, usize> = BTreeMap::new();
    for e in ledger.quarantined() {
        *by_tag.entry(e.question.unwrap().tag()).or_default() += 1;
    }
    report(
        2,
        "theorem verdicts match the oracle outside quarantine",
        &failures,
        format!(
            "{} records, {}/{} agree outside quarantine, {} quarantined {:?}, all certificates re-verified",
            records.len(),
            agree_outside,
            outside.len(),
            ledger.quarantined().len(),
            by_tag
        ),
    );
}

#[test]
fn criterion_3_z2_is_degree_parity() {
    let z2 = group("Z2");
    let mut failures = Vec::new();
    let instances = grid();
    for (inst, g) in &instances {
        let status = exists_magic(g, &z2).unwrap().status;
        if (status == SolveStatus::Witness) != degrees_same_parity(g) {
            failures.push(format!("{inst}: {status:?}"));
        }
    }
    report(
        3,
        "Z2 labelings exist iff all degrees share a parity",
        &failures,
        format!("{} grid instances", instances.len()),
    );
}

#[test]
fn criterion_4_constructions_verify() {
    let mut failures = Vec::new();
    let mut built = 0;
    for (inst, g) in grid() {
        for a in extended_catalog() {
            let v = predict(&inst, &a).unwrap();
            if v.outcome != Outcome::Magic {
                continue;
            }
            built += 1;
            match construct_labeling(&inst, &a) {
                Ok(l) if verify_magic(&g, &l).unwrap().is_some() => {}
                Ok(_) => failures.push(format!("{inst} over {a}: labeling does not verify")),
                Err(e) => failures.push(e.to_string()),
            }
        }
    }
    report(
        4,
        "every magic prediction has a verified construction",
        &failures,
        format!(
            "{built} predictions, {} without a construction",
            failures.len()
        ),
    );
}

#[test]
fn criterion_5_headline_theorems() {
    let mut failures = Vec::new();
    let solver = Solver::default();
    let m11 = build(&"M11(0,0)".parse().unwrap()).unwrap().graph;
    for a in extended_catalog() {
        if exists_magic(&m11, &a).unwrap().status != SolveStatus::Witness {
            failures.push(format!("M11(0,0) over {a}: no witness"));
        }
    }
    if classify_group_vertex_magic(&m11) != ClassifyVerdict::Yes(Rule::BicyclicDiameter3) {
        failures.push("M11(0,0) not classified as group vertex magic".into());
    }

    let small = enumerate_abelian_groups(5);
    let named: BTreeMap<FamilyId, GroupSpec> = vmagic::characterize::corollary_refuters();
    let mut refuted = 0;
    for (inst, g) in grid().iter().filter(|(i, _)| i.family.is_bicyclic()) {
        if inst.to_string() == "B3-M11(0,0)" {
            continue;
        }
        match solver.empirical_verdict(g, &small).unwrap() {
            EmpiricalVerdict::RefutedBy(_) => refuted += 1,
            EmpiricalVerdict::SurvivesCatalog => {
                failures.push(format!("{inst} survives every group of order <= 5"))
            }
        }
        if let Some(a) = named.get(&inst.family) {
            if exists_magic(g, a).unwrap().status != SolveStatus::Exhausted {
                failures.push(format!("{inst}: named refuter {a} admits a labeling"));
            }
        }
    }

    let mut fig1 = 0;
    for (inst, g) in grid() {
        match inst.family {
            FamilyId::Cycle if matches!(inst.params[0], 4 | 5) => {
                if classify_group_vertex_magic(&g) != ClassifyVerdict::Yes(Rule::Regular) {
                    failures.push(format!("{inst} not accepted"));
                }
            }
            FamilyId::Fig1G1 => {
                fig1 += 1;
                match classify_group_vertex_magic(&g) {
                    ClassifyVerdict::No { refuter, .. } => {
                        if exists_magic(&g, &refuter).unwrap().status != SolveStatus::Exhausted {
                            failures.push(format!("{inst}: refuter {refuter} admits a labeling"));
                        }
                    }
                    other => failures.push(format!("{inst}: classified {other:?}")),
                }
            }
            _ => {}
        }
    }
    report(
        5,
        "headline theorems",
        &failures,
        format!("M11(0,0) magic over {} groups; {refuted} other bicyclic instances refuted; C4, C5 accepted; {fig1} FIG1-G1 instances refuted", extended_catalog().len()),
    );
}

fn obstructed_graphs(count: usize) -> Vec<Graph> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let g = random_graph(5 + (seed % 5) as usize, (seed % 3) as usize, seed);
        if neighborhood_obstruction(&g).is_some() {
            out.push(g);
        }
        seed += 1;
    }
    out
}

/// Whether `target` is a sum of `n` nonzero elements, by trying every tuple.
fn naive_decomposable(t: &CayleyTable, target: u16, n: usize) -> bool {
    fn go(t: &CayleyTable, rest: u16, n: usize) -> bool {
        if n == 0 {
            return rest == 0;
        }
        (1..t.order() as u16).any(|x| go(t, t.sub(rest, x), n - 1))
    }
    go(t, target, n)
}

#[test]
fn criterion_6_structural_facts() {
    let mut failures = Vec::new();
    let groups = extended_catalog();

    let mut obstructed: Vec<(String, Graph)> = grid()
        .into_iter()
        .filter(|(i, _)| matches!(i.family, FamilyId::M6 | FamilyId::M7))
        .map(|(i, g)| (i.to_string(), g))
        .collect();
    let family_count = obstructed.len();
    obstructed.extend(
        obstructed_graphs(20)
            .into_iter()
            .enumerate()
            .map(|(k, g)| (format!("random #{k}"), g)),
    );
    for (name, g) in &obstructed {
        if neighborhood_obstruction(g).is_none() {
            failures.push(format!("{name}: no obstruction found"));
        }
        for a in &groups {
            if exists_magic(g, a).unwrap().status != SolveStatus::Exhausted {
                failures.push(format!("{name} over {a}: obstructed graph has a labeling"));
            }
        }
    }

    let mut sums = 0;
    for a in enumerate_abelian_groups(8) {
        let t = CayleyTable::new(&a).unwrap();
        for idx in 0..a.order() {
            let target = a.element_at(idx);
            for n in 0..=6 {
                sums += 1;
                let expected = naive_decomposable(&t, idx as u16, n);
                match a.decompose_sum(&target, n) {
                    Ok(parts) => {
                        let sum = parts.iter().fold(a.zero(), |s, p| a.add(&s, p).unwrap());
                        if !expected
                            || parts.len() != n
                            || sum != target
                            || parts.iter().any(|p| p.is_zero())
                        {
                            failures
                                .push(format!("decompose {target} into {n} over {a}: bad parts"));
                        }
                    }
                    Err(_) if expected => {
                        failures.push(format!("decompose {target} into {n} over {a}: refused"))
                    }
                    Err(_) => {}
                }
            }
        }
    }

    let mut suns = 0;
    let big: Vec<GroupSpec> = catalog(8).into_iter().filter(|a| a.order() >= 3).collect();
    for n in 4..=10 {
        for g in enumerate_connected(n, 1, None)
            .unwrap()
            .into_iter()
            .filter(is_generalized_sun)
        {
            suns += 1;
            let profile = classify_vertices(&g);
            let all_supports = sun_cycle(&g)
                .unwrap()
                .iter()
                .all(|&v| profile.is_support(v));
            for a in &big {
                let found = exists_magic(&g, a).unwrap().status == SolveStatus::Witness;
                if found != all_supports {
                    failures.push(format!(
                        "sun {:?} over {a}: oracle {found}, expected {all_supports}",
                        g.edges()
                    ));
                }
            }
        }
    }

    let mut cauchy = 0;
    for a in enumerate_abelian_groups(16) {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let divides = (a.order() as u64).is_multiple_of(p);
            match a.cauchy_element(p) {
                Ok(x) => {
                    cauchy += 1;
                    if !divides || a.element_order(&x) != Ok(p) {
                        failures.push(format!("cauchy {p} in {a}: {x}"));
                    }
                }
                Err(_) if divides => failures.push(format!("cauchy {p} in {a}: refused")),
                Err(_) => {}
            }
        }
    }

    report(
        6,
        "structural facts",
        &failures,
        format!(
            "{} obstructed graphs ({family_count} from M6/M7) exhausted over {} groups; {sums} decompositions; {suns} suns; {cauchy} Cauchy elements",
            obstructed.len(),
            groups.len()
        ),
    );
}

#[test]
fn criterion_7_family_audit() {
    let audit = audit_families(10);
    let mut failures: Vec<String> = audit
        .unrecognized
        .iter()
        .map(|e| format!("unrecognized {e}"))
        .collect();
    failures.extend(audit.ambiguous.iter().map(|e| format!("ambiguous {e}")));
    let text = audit.to_string();
    for x in AuditException::ALL {
        let count = audit.exceptions.get(&x).copied().unwrap_or(0);
        let line = format!("exception {} ({count} graphs): {}", x.tag(), x.note());
        if count == 0 || !text.contains(&line) {
            failures.push(format!("exception {} missing from the report", x.tag()));
        }
    }
    for (rank, d, families) in [(1, 1, vec!["CYCLE"]), (1, 2, vec!["CYCLE", "FIG1-G1"])] {
        let found: Vec<&str> = audit.families_at(rank, d).into_iter().collect();
        if found != families {
            failures.push(format!("rank {rank} diameter {d}: {found:?}"));
        }
    }
    let graphs: usize = audit.counts.values().sum();
    report(
        7,
        "family audit",
        &failures,
        format!(
            "{graphs} graphs recognized, {} unrecognized, exceptions {:?}",
            audit.unrecognized.len(),
            audit
                .exceptions
                .iter()
                .map(|(x, c)| (x.tag(), *c))
                .collect::<Vec<_>>()
        ),
    );
}
