//! Distance-based clustering: complete-link agglomerative and k-medoids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimilarityMatrix;

pub type Clusters = Vec<Vec<usize>>;

const MAX_ITER: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clustering {
    Ahc,
    Kmedoids,
}

impl std::str::FromStr for Clustering {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ahc" => Ok(Clustering::Ahc),
            "kmedoids" => Ok(Clustering::Kmedoids),
            _ => Err(format!("unknown clustering {s}")),
        }
    }
}

/// Sorts members and clusters by smallest member.
pub fn canonical(mut c: Clusters) -> Clusters {
    c.iter_mut().for_each(|x| x.sort_unstable());
    c.retain(|x| !x.is_empty());
    c.sort();
    c
}

/// One merge of the agglomeration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Merge {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub distance: f64,
}

/// Merges the pair of clusters with the smallest maximum pairwise distance until `k` remain.
pub fn ahc_complete(d: &SimilarityMatrix, k: usize) -> (Clusters, Vec<Merge>) {
    let mut clusters: Clusters = (0..d.n).map(|i| vec![i]).collect();
    let mut linkage = Vec::new();
    let link = |a: &[usize], b: &[usize]| {
        a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| d.get(i, j)).fold(0.0, f64::max)
    };
    while clusters.len() > k.max(1) {
        let mut best = (0, 1, f64::INFINITY);
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let l = link(&clusters[i], &clusters[j]);
                if l < best.2 {
                    best = (i, j, l);
                }
            }
        }
        let (i, j, dist) = best;
        let right = clusters.remove(j);
        linkage.push(Merge { left: clusters[i].clone(), right: right.clone(), distance: dist });
        clusters[i].extend(right);
    }
    (canonical(clusters), linkage)
}

fn assign(d: &SimilarityMatrix, medoids: &[usize]) -> Vec<usize> {
    (0..d.n)
        .map(|p| {
            (0..medoids.len())
                .min_by(|&a, &b| d.get(p, medoids[a]).total_cmp(&d.get(p, medoids[b])))
                .expect("at least one medoid")
        })
        .collect()
}

/// Seeds by sampling each next medoid with probability proportional to its squared
/// distance from the closest medoid so far.
fn seed(d: &SimilarityMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut medoids = vec![rng.gen_range(0..d.n)];
    while medoids.len() < k {
        let w: Vec<f64> = (0..d.n)
            .map(|p| {
                if medoids.contains(&p) {
                    0.0
                } else {
                    medoids.iter().map(|&m| d.get(p, m)).fold(f64::INFINITY, f64::min).powi(2)
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.gen::<f64>() * total;
            let mut pick = None;
            for (p, x) in w.iter().enumerate() {
                if *x > 0.0 {
                    pick = Some(p);
                    if r < *x {
                        break;
                    }
                    r -= x;
                }
            }
            pick.expect("positive weight exists")
        } else {
            let free: Vec<usize> = (0..d.n).filter(|p| !medoids.contains(p)).collect();
            free[rng.gen_range(0..free.len())]
        };
        medoids.push(next);
    }
    medoids
}

/// Alternates assignment and per-cluster medoid update until stable or 300 iterations.
pub fn k_medoids(d: &SimilarityMatrix, k: usize, seed_value: u64) -> Clusters {
    let k = k.clamp(1, d.n.max(1));
    if d.n == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed_value);
    let mut medoids = seed(d, k, &mut rng);
    let mut labels = assign(d, &medoids);
    for _ in 0..MAX_ITER {
        let mut changed = false;
        for (c, m) in medoids.iter_mut().enumerate() {
            let members: Vec<usize> = (0..d.n).filter(|&p| labels[p] == c).collect();
            if members.is_empty() {
                continue;
            }
            let cost = |x: usize| members.iter().map(|&p| d.get(p, x)).sum::<f64>();
            let best = members.iter().copied().min_by(|&a, &b| cost(a).total_cmp(&cost(b))).expect("nonempty");
            if cost(best) < cost(*m) {
                *m = best;
                changed = true;
            }
        }
        let next = assign(d, &medoids);
        if !changed && next == labels {
            break;
        }
        labels = next;
    }
    let mut out = vec![Vec::new(); k];
    for (p, &c) in labels.iter().enumerate() {
        out[c].push(p);
    }
    canonical(out)
}

pub fn cluster(d: &SimilarityMatrix, how: Clustering, k: usize, seed_value: u64) -> Clusters {
    match how {
        Clustering::Ahc => ahc_complete(d, k).0,
        Clustering::Kmedoids => k_medoids(d, k, seed_value),
    }
}
