use std::collections::BTreeSet;
use std::path::Path;

use hwmt_core::census::{load_polytopes, report, run_census, ReportFormat, TypeLabel};
use hwmt_core::lattice_polytope::{is_kernel_pair, is_mirror_kernel_pair};

fn tables() -> Vec<hwmt_core::census::PolytopeRecord> {
    load_polytopes(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/tables3d.txt")).unwrap()
}

const TABLE_ROWS: &[(&str, &[(u32, u32)])] = &[
    ("(1,1,1,1)", &[(0, 4311), (8, 3313), (427, 427), (429, 429)]),
    ("(1,1,1,3)", &[(2, 4317), (85, 3726), (741, 1943)]),
    ("(1,1,2,2)", &[(1, 4281), (742, 742), (743, 744)]),
    ("(1,1,2,4)", &[(9, 4312), (428, 3315), (430, 3312), (431, 3314)]),
    ("(1,1,4,6)", &[(88, 4318), (1946, 3725)]),
    ("(1,2,2,5)", &[(31, 4255)]),
    ("(1,2,3,6)", &[(89, 4228), (1944, 1948), (1947, 1947)]),
    ("(1,2,6,9)", &[(745, 4282)]),
    ("(1,3,4,4)", &[(87, 3727)]),
    ("(1,3,8,12)", &[(1949, 4229)]),
    ("(1,4,5,10)", &[(1114, 3993)]),
    ("(1,6,14,21)", &[(4080, 4080)]),
    ("(2,3,3,4)", &[(86, 1945)]),
    ("(2,3,10,15)", &[(3038, 3038)]),
    ("Group I", &[(3, 4283), (753, 754)]),
    ("Group II", &[(10, 4314), (433, 3316), (436, 3321)]),
];

#[test]
fn reproduces_the_tables() {
    let records = tables();
    let result = run_census(&records).unwrap();
    assert_eq!(result.pairs.len(), 32);
    assert_eq!(result.self_dual(), 6);
    assert_eq!(result.types.len(), 16);
    for (t, (label, pairs)) in result.types.iter().zip(TABLE_ROWS) {
        assert_eq!(t.label.as_ref().unwrap().to_string(), *label);
        assert_eq!(result.pairs_of(t), pairs.to_vec(), "{label}");
        let members: BTreeSet<u32> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        assert_eq!(t.members, members, "{label}");
    }
}

#[test]
fn types_cover_the_fixture_without_overlap() {
    let records = tables();
    let result = run_census(&records).unwrap();
    let mut all = BTreeSet::new();
    for t in &result.types {
        for &m in &t.members {
            assert!(all.insert(m), "{m} in two types");
        }
    }
    assert_eq!(all, records.iter().map(|r| r.id).collect());
}

#[test]
fn members_are_kernel_pairs_and_pairs_are_mirror_pairs() {
    let records = tables();
    let get = |id: u32| &records.iter().find(|r| r.id == id).unwrap().polytope;
    let result = run_census(&records).unwrap();
    for t in &result.types {
        let ids: Vec<u32> = t.members.iter().copied().collect();
        for &a in &ids {
            for &b in &ids {
                assert!(is_kernel_pair(get(a), get(b), None).is_some(), "{a} {b}");
            }
        }
    }
    for &(a, b) in &result.pairs {
        assert!(is_mirror_kernel_pair(get(a), get(b)).unwrap());
        assert!(is_mirror_kernel_pair(get(b), get(a)).unwrap());
    }
}

#[test]
fn simplex_kernels_are_the_weights() {
    let records = tables();
    let result = run_census(&records).unwrap();
    for t in &result.types {
        if let Some(TypeLabel::Weights(w)) = &t.label {
            assert_eq!(t.kernel.rank(), 1);
            let mut g: Vec<i64> = t.kernel.basis[0].clone();
            assert!(g.iter().all(|&x| x > 0) || g.iter().all(|&x| x < 0));
            g = g.iter().map(|x| x.abs()).collect();
            g.sort_unstable();
            assert_eq!(&g, w);
        }
    }
}

#[test]
fn reports() {
    let result = run_census(&tables()).unwrap();
    let md = report(&result, ReportFormat::Markdown);
    assert_eq!(md.lines().filter(|l| l.starts_with("| (")).count(), 14);
    assert_eq!(md.lines().filter(|l| l.starts_with("| Group")).count(), 2);
    let json: serde_json::Value = serde_json::from_str(&report(&result, ReportFormat::Json)).unwrap();
    assert_eq!(json["counts"]["pairs"], 32);
    assert_eq!(json["counts"]["self_dual"], 6);
    assert_eq!(json["counts"]["types"], 16);
    let csv = report(&result, ReportFormat::Csv);
    assert_eq!(csv.lines().count(), 33);
    assert_eq!(report(&result, ReportFormat::Json), report(&run_census(&tables()).unwrap(), ReportFormat::Json));
}
