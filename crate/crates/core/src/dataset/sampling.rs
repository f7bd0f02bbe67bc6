//! Seeded example sampling: one `(x, y)` observation per selected vehicle, at
//! a uniformly random step of that vehicle's trajectory.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{route_to_label, Dataset, DatasetError, Provenance, Result};
use crate::svm::LabeledExample;
use crate::traffic_sim::{Trace, TrajectoryPoint};

type Groups<'a> = Vec<(&'a str, Vec<&'a TrajectoryPoint>)>;

fn pick(groups: &Groups<'_>, chosen: &[usize], rng: &mut ChaCha8Rng, seed: u64) -> Dataset {
    let mut examples = Vec::with_capacity(chosen.len());
    let mut vehicle_ids = Vec::with_capacity(chosen.len());
    for &v in chosen {
        let (id, pts) = &groups[v];
        let p = pts[rng.gen_range(0..pts.len())];
        examples.push(LabeledExample::new(vec![p.x, p.y], route_to_label(p.route)));
        vehicle_ids.push((*id).to_string());
    }
    Dataset {
        examples,
        vehicle_ids,
        provenance: Provenance::Generated,
        seed,
    }
}

fn shuffled_vehicles(n_vehicles: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n_vehicles).collect();
    order.shuffle(rng);
    order
}

fn require(needed: usize, available: usize) -> Result<()> {
    if needed > available {
        Err(DatasetError::InsufficientVehicles { needed, available })
    } else {
        Ok(())
    }
}

/// Draws `n` distinct vehicles without replacement and one observation from each.
pub fn sample_examples(trace: &Trace, n: usize, seed: u64) -> Result<Dataset> {
    let groups = trace.by_vehicle();
    require(n, groups.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = shuffled_vehicles(groups.len(), &mut rng);
    Ok(pick(&groups, &order[..n], &mut rng, seed))
}

/// Train and test sets. With `disjoint`, the two sets come from disjoint
/// vehicles; otherwise each is drawn independently from all vehicles.
pub fn split(
    trace: &Trace,
    n_train: usize,
    n_test: usize,
    seed: u64,
    disjoint: bool,
) -> Result<(Dataset, Dataset)> {
    if !disjoint {
        let groups = trace.by_vehicle();
        require(n_train.max(n_test), groups.len())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = shuffled_vehicles(groups.len(), &mut rng);
        let train = pick(&groups, &order[..n_train], &mut rng, seed);
        rng.set_stream(1);
        let order = shuffled_vehicles(groups.len(), &mut rng);
        let test = pick(&groups, &order[..n_test], &mut rng, seed);
        return Ok((train, test));
    }
    let pools = SplitPools::new(trace, n_train, n_train + n_test, seed)?;
    let test = pools.test_set(n_test, 0)?;
    Ok((pools.train, test))
}

pub fn split_disjoint(
    trace: &Trace,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    split(trace, n_train, n_test, seed, true)
}

/// A training set plus the pool of vehicles it did not use, from which
/// independent test sets are drawn on separate RNG streams.
pub struct SplitPools<'a> {
    pub train: Dataset,
    groups: Groups<'a>,
    remaining: Vec<usize>,
    seed: u64,
}

impl<'a> SplitPools<'a> {
    /// Fails unless the trace has at least `min_total` vehicles.
    pub fn new(trace: &'a Trace, n_train: usize, min_total: usize, seed: u64) -> Result<Self> {
        let groups = trace.by_vehicle();
        require(min_total.max(n_train), groups.len())?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = shuffled_vehicles(groups.len(), &mut rng);
        let train = pick(&groups, &order[..n_train], &mut rng, seed);
        let remaining = order[n_train..].to_vec();
        Ok(Self {
            train,
            groups,
            remaining,
            seed,
        })
    }

    pub fn pool_size(&self) -> usize {
        self.remaining.len()
    }

    /// `n` examples from vehicles outside the training set, drawn on stream
    /// `stream + 1` of the seed (stream 0 produced the training set).
    pub fn test_set(&self, n: usize, stream: u64) -> Result<Dataset> {
        require(n, self.remaining.len())?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream + 1);
        let mut pool = self.remaining.clone();
        pool.shuffle(&mut rng);
        Ok(pick(&self.groups, &pool[..n], &mut rng, self.seed))
    }
}
