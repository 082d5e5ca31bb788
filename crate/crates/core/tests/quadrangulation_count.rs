//! Rooted quadrangulations counted directly as permutation pairs, against the
//! counts extracted from the map curve.
//!
//! Darts 0..4F, faces φ = (0 1 2 3)(4 5 6 7)..., edges a fixed-point-free
//! involution α, vertices the cycles of φα. Each connected (φ, α) of genus g
//! is one labelled map; rooted maps number 4F · #α / (4^F F!), the size of
//! the orbit of φ divided by the (4F-1)! relabellings that fix the root.

use toprec::coeff::{rat, Rat};
use toprec::extract::{map_count_extract, MapCountRequest};

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

struct Counter {
    phi: Vec<usize>,
    alpha: Vec<usize>,
    /// Connected matchings by genus.
    by_genus: Vec<u64>,
}

impl Counter {
    fn new(faces: usize) -> Self {
        let n = 4 * faces;
        let phi = (0..n).map(|d| if d % 4 == 3 { d - 3 } else { d + 1 }).collect();
        Counter {
            phi,
            alpha: vec![usize::MAX; n],
            by_genus: vec![0; faces + 1],
        }
    }

    fn run(&mut self) {
        match self.alpha.iter().position(|&a| a == usize::MAX) {
            None => self.leaf(),
            Some(i) => {
                for j in i + 1..self.alpha.len() {
                    if self.alpha[j] == usize::MAX {
                        self.alpha[i] = j;
                        self.alpha[j] = i;
                        self.run();
                        self.alpha[i] = usize::MAX;
                        self.alpha[j] = usize::MAX;
                    }
                }
            }
        }
    }

    fn leaf(&mut self) {
        let n = self.alpha.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for d in 0..n {
            for e in [self.phi[d], self.alpha[d]] {
                let (a, b) = (find(&mut parent, d), find(&mut parent, e));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        if (0..n).any(|d| find(&mut parent, d) != root) {
            return;
        }
        let mut seen = vec![false; n];
        let mut vertices = 0i64;
        for d in 0..n {
            if !seen[d] {
                vertices += 1;
                let mut e = d;
                while !seen[e] {
                    seen[e] = true;
                    e = self.phi[self.alpha[e]];
                }
            }
        }
        let faces = (n / 4) as i64;
        let edges = 2 * faces;
        let euler = vertices - edges + faces;
        let g = ((2 - euler) / 2) as usize;
        self.by_genus[g] += 1;
    }
}

fn rooted_counts(faces: usize) -> Vec<Rat> {
    let mut c = Counter::new(faces);
    c.run();
    let mut denom: i64 = 1;
    for k in 1..=faces as i64 {
        denom *= 4 * k;
    }
    c.by_genus
        .iter()
        .map(|&m| rat(4 * faces as i64 * m as i64, denom))
        .collect()
}

#[test]
fn brute_force_agrees_with_extraction() {
    let max_faces = 4;
    let brute: Vec<Vec<Rat>> = (1..=max_faces).map(rooted_counts).collect();
    for g in 0..=2u32 {
        let table = map_count_extract(&MapCountRequest::new(g, 1..=max_faces as u32)).unwrap();
        for f in 1..=max_faces {
            let direct = brute[f - 1].get(g as usize).cloned().unwrap_or_else(|| rat(0, 1));
            assert_eq!(table.get(f as u32), Some(&direct), "genus {g}, {f} faces");
        }
    }
    // Genus 1: 1, 15, 198, 2511.
    let g1: Vec<Rat> = brute.iter().map(|v| v[1].clone()).collect();
    assert_eq!(g1, [rat(1, 1), rat(15, 1), rat(198, 1), rat(2511, 1)]);
}
