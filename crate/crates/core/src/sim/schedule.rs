//! Greedy protocol-model WiFi scheduling.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::scalar::Real;
use crate::topology::HetNetTopology;

/// A WiFi transmission waiting for airtime. Lower `priority` values are
/// considered first; equal priorities are visited in random order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PendingTx {
    pub tx: usize,
    pub rx: usize,
    pub priority: u32,
}

impl PendingTx {
    pub fn new(tx: usize, rx: usize) -> Self {
        PendingTx { tx, rx, priority: 0 }
    }
}

/// Greedy maximal feasible set. Returns indices into `pending` of the admitted
/// transmissions.
///
/// A candidate is admitted when neither endpoint is already busy, its receiver
/// clears the guard distance from every admitted transmitter, and every
/// admitted receiver clears the guard distance from the candidate.
pub fn schedule_wifi_slot<S: Real, R: Rng + ?Sized>(
    pending: &[PendingTx],
    topology: &HetNetTopology<S>,
    rng: &mut R,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pending.len()).collect();
    order.shuffle(rng);
    order.sort_by_key(|&i| pending[i].priority);

    let guard = S::one() + topology.params().delta;
    let mut admitted: Vec<usize> = Vec::new();
    let mut busy: Vec<usize> = Vec::new();
    'next: for i in order {
        let c = pending[i];
        if c.tx == c.rx || busy.contains(&c.tx) || busy.contains(&c.rx) {
            continue;
        }
        let link = topology.distance(c.tx, c.rx);
        if link > topology.params().wifi_range {
            continue;
        }
        for &j in &admitted {
            let a = pending[j];
            if topology.distance(c.rx, a.tx) < guard * link {
                continue 'next;
            }
            if topology.distance(a.rx, c.tx) < guard * topology.distance(a.tx, a.rx) {
                continue 'next;
            }
        }
        busy.push(c.tx);
        busy.push(c.rx);
        admitted.push(i);
    }
    admitted.sort_unstable();
    admitted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{Point, TopologyParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(n: usize) -> HetNetTopology<f64> {
        let positions = (0..n).map(|i| Point::new(i as f64 * 100.0, 0.0)).collect();
        HetNetTopology::from_positions(TopologyParams::default(), positions, None, &[], vec![]).unwrap()
    }

    #[test]
    fn distant_links_both_admitted() {
        let t = chain(8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = [PendingTx::new(0, 1), PendingTx::new(5, 6)];
        assert_eq!(schedule_wifi_slot(&p, &t, &mut rng), vec![0, 1]);
    }

    #[test]
    fn adjacent_links_conflict() {
        let t = chain(4);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = [PendingTx::new(0, 1), PendingTx::new(2, 3)];
            assert_eq!(schedule_wifi_slot(&p, &t, &mut rng).len(), 1);
        }
    }

    #[test]
    fn three_hop_reuse_on_chain() {
        let t = chain(10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p: Vec<_> = (0..9)
            .map(|i| PendingTx {
                tx: i,
                rx: i + 1,
                priority: (9 - i) as u32,
            })
            .collect();
        let got = schedule_wifi_slot(&p, &t, &mut rng);
        // downstream first: 8->9, 5->6, 2->3
        assert_eq!(got, vec![2, 5, 8]);
    }

    #[test]
    fn one_reception_per_receiver() {
        let positions = vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(100.0, 0.0)];
        let t = HetNetTopology::from_positions(TopologyParams::<f64>::default(), positions, None, &[], vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = [PendingTx::new(1, 0), PendingTx::new(2, 0)];
        assert_eq!(schedule_wifi_slot(&p, &t, &mut rng).len(), 1);
    }
}
