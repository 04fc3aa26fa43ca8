use std::collections::BTreeMap;

use super::parse::{AssociationRecord, DerivedEncounter};

/// Every pairwise co-location interval: two nodes on the same access point
/// with overlapping sessions. Sweep-line per access point; output sorted by
/// start time, ties by node pair.
pub fn derive_encounters(associations: &[AssociationRecord]) -> Vec<DerivedEncounter> {
    let mut by_ap: BTreeMap<&str, Vec<&AssociationRecord>> = BTreeMap::new();
    for r in associations {
        by_ap.entry(r.ap_id.as_str()).or_default().push(r);
    }
    let mut out = Vec::new();
    for sessions in by_ap.values_mut() {
        sessions.sort_by(|a, b| a.t_start.total_cmp(&b.t_start).then(a.node_id.cmp(&b.node_id)));
        let mut active: Vec<&AssociationRecord> = Vec::new();
        for &s in sessions.iter() {
            active.retain(|a| a.t_end > s.t_start);
            for a in &active {
                if a.node_id != s.node_id {
                    out.push(DerivedEncounter::new(a.node_id, s.node_id, s.t_start, a.t_end.min(s.t_end)));
                }
            }
            active.push(s);
        }
    }
    out.sort_by(DerivedEncounter::cmp_time);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(node_id: u64, ap: &str, t_start: f64, t_end: f64) -> AssociationRecord {
        AssociationRecord { node_id, ap_id: ap.to_string(), t_start, t_end }
    }

    /// Quadratic reference: intersect every pair.
    fn brute_force(records: &[AssociationRecord]) -> Vec<DerivedEncounter> {
        let mut out = Vec::new();
        for (i, a) in records.iter().enumerate() {
            for b in &records[i + 1..] {
                if a.ap_id != b.ap_id || a.node_id == b.node_id {
                    continue;
                }
                let (s, e) = (a.t_start.max(b.t_start), a.t_end.min(b.t_end));
                if e > s {
                    out.push(DerivedEncounter::new(a.node_id, b.node_id, s, e));
                }
            }
        }
        out.sort_by(DerivedEncounter::cmp_time);
        out
    }

    #[test]
    fn single_overlap() {
        let e = derive_encounters(&[rec(1, "ap1", 0.0, 100.0), rec(2, "ap1", 50.0, 150.0)]);
        assert_eq!(e, vec![DerivedEncounter::new(1, 2, 50.0, 100.0)]);
    }

    #[test]
    fn different_aps_never_meet() {
        assert!(derive_encounters(&[rec(1, "ap1", 0.0, 100.0), rec(2, "ap2", 0.0, 100.0)]).is_empty());
    }

    #[test]
    fn touching_sessions_do_not_meet() {
        assert!(derive_encounters(&[rec(1, "a", 0.0, 10.0), rec(2, "a", 10.0, 20.0)]).is_empty());
    }

    #[test]
    fn six_line_fixture() {
        // ap1: 10 [0,100], 11 [40,60]        -> (10,11,[40,60])
        // ap2: 12 [10,30], 13 [25,80]        -> (12,13,[25,30])
        // ap3: 10 [200,300]; ap1: 12 [100,120] touches 10's end only
        let recs = [
            rec(10, "ap1", 0.0, 100.0),
            rec(11, "ap1", 40.0, 60.0),
            rec(12, "ap2", 10.0, 30.0),
            rec(13, "ap2", 25.0, 80.0),
            rec(10, "ap3", 200.0, 300.0),
            rec(12, "ap1", 100.0, 120.0),
        ];
        assert_eq!(
            derive_encounters(&recs),
            vec![DerivedEncounter::new(12, 13, 25.0, 30.0), DerivedEncounter::new(10, 11, 40.0, 60.0)]
        );
    }

    #[test]
    fn random_fixture_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let recs: Vec<_> = (0..50)
            .map(|_| {
                let s = rng.random_range(0.0..1000.0);
                let ap = format!("ap{}", rng.random_range(0..4));
                rec(rng.random_range(0..12), &ap, s, s + rng.random_range(1.0..300.0))
            })
            .collect();
        let fast = derive_encounters(&recs);
        assert!(!fast.is_empty());
        assert_eq!(fast, brute_force(&recs));
    }

    fn arb_records() -> impl Strategy<Value = Vec<AssociationRecord>> {
        proptest::collection::vec((0u64..15, 0u8..5, 0u32..500, 1u32..200), 0..200).prop_map(|v| {
            v.into_iter().map(|(n, ap, s, d)| rec(n, &format!("ap{ap}"), s as f64, (s + d) as f64)).collect()
        })
    }

    proptest! {
        #[test]
        fn sweep_equals_quadratic(recs in arb_records()) {
            prop_assert_eq!(derive_encounters(&recs), brute_force(&recs));
        }
    }
}
