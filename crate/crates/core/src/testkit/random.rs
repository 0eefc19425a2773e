//! Seeded generator of instances that carry a known valid decomposition.
//!
//! Every inner vertex gets a random decoding target set (randomly choosing,
//! per child edge, whether it reaches the shared vertex or decodes through
//! the child). Each target is then reached exactly once, either by a direct
//! edge or through a non-inner gadget whose out-neighbours lie in one node.
//! Gadgets may be shared by several roots and may be chained two deep.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Digraph, SuicpInstance, VertexId};
use crate::oic::{verify_oic, DecompNode, NodeKey, PolytreeDecomposition, TreeEdge};

/// Shape of the generated decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    /// Number of nodes at each depth, root level first.
    pub widths: Vec<usize>,
    pub min_size: usize,
    pub max_size: usize,
    /// Upper bound on the number of non-inner vertices.
    pub max_non_inner: usize,
}

impl Profile {
    pub fn validate(&self) -> Result<()> {
        if self.widths.is_empty() || self.widths.contains(&0) {
            return Err(Error::Profile("every depth needs at least one node".into()));
        }
        if self.min_size == 0 || self.min_size > self.max_size {
            return Err(Error::Profile(format!(
                "node size range {}-{} is empty",
                self.min_size, self.max_size
            )));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.widths.iter().sum()
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.widths.iter().map(|w| w.to_string()).collect();
        write!(
            f,
            "w={};size={}-{};ni={}",
            w.join(","),
            self.min_size,
            self.max_size,
            self.max_non_inner
        )
    }
}

/// Parses `w=1,2;size=3-4;ni=3`. `size` may be a single number; `ni`
/// defaults to zero.
impl FromStr for Profile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut widths = None;
        let mut size = None;
        let mut ni = 0;
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("profile value {s:?} is not a number")))
        };
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("profile entry {part:?} is not key=value")))?;
            match key.trim() {
                "w" => widths = Some(value.split(',').map(num).collect::<Result<Vec<_>>>()?),
                "size" => {
                    size = Some(match value.split_once('-') {
                        Some((a, b)) => (num(a)?, num(b)?),
                        None => (num(value)?, num(value)?),
                    })
                }
                "ni" => ni = num(value)?,
                other => return Err(Error::Parse(format!("unknown profile key {other:?}"))),
            }
        }
        let widths = widths.ok_or_else(|| Error::Parse("profile needs w=".into()))?;
        let (min_size, max_size) = size.ok_or_else(|| Error::Parse("profile needs size=".into()))?;
        let p = Profile {
            widths,
            min_size,
            max_size,
            max_non_inner: ni,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedOic {
    pub instance: SuicpInstance,
    pub decomposition: PolytreeDecomposition,
    pub seed: u64,
}

struct Gadget {
    id: usize,
    termini: BTreeSet<usize>,
}

struct Builder<'a> {
    rng: ChaCha8Rng,
    keys: Vec<NodeKey>,
    /// (parent, child) indices into `keys`.
    links: Vec<(usize, usize)>,
    shared: Vec<usize>,
    verts: Vec<BTreeSet<usize>>,
    profile: &'a Profile,
}

impl Builder<'_> {
    fn child_links(&self, n: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links
            .iter()
            .zip(&self.shared)
            .filter(move |((p, _), _)| *p == n)
            .map(|((_, c), x)| (*c, *x))
    }

    fn child_shared(&self, n: usize) -> BTreeSet<usize> {
        self.child_links(n).map(|(_, x)| x).collect()
    }

    fn parent_shared(&self, n: usize) -> BTreeSet<usize> {
        self.links
            .iter()
            .zip(&self.shared)
            .filter(|((_, c), _)| *c == n)
            .map(|(_, x)| *x)
            .collect()
    }

    fn polytree(&mut self) -> Result<()> {
        let w = &self.profile.widths;
        for (depth, &count) in w.iter().enumerate() {
            for j in 1..=count {
                self.keys.push(NodeKey::new(depth, j));
            }
        }
        let at = |d: usize, keys: &[NodeKey]| -> Vec<usize> { (0..keys.len()).filter(|&i| keys[i].depth == d).collect() };
        let mut comp: Vec<usize> = (0..self.keys.len()).collect();
        fn find(comp: &mut [usize], mut i: usize) -> usize {
            while comp[i] != i {
                comp[i] = comp[comp[i]];
                i = comp[i];
            }
            i
        }
        // Every positive-depth node gets one parent, then extra parent edges
        // join the remaining components without closing an undirected cycle.
        for d in 1..w.len() {
            let uppers = at(d - 1, &self.keys);
            for c in at(d, &self.keys) {
                let p = *uppers.choose(&mut self.rng).expect("widths are positive");
                self.links.push((p, c));
                let (a, b) = (find(&mut comp, p), find(&mut comp, c));
                comp[a] = b;
            }
        }
        let mut extra: Vec<(usize, usize)> = (1..w.len())
            .flat_map(|d| {
                let uppers = at(d - 1, &self.keys);
                at(d, &self.keys).into_iter().flat_map(move |c| uppers.clone().into_iter().map(move |p| (p, c)))
            })
            .collect();
        extra.shuffle(&mut self.rng);
        for (p, c) in extra {
            let (a, b) = (find(&mut comp, p), find(&mut comp, c));
            if a != b {
                comp[a] = b;
                self.links.push((p, c));
            }
        }
        let root = find(&mut comp, 0);
        if (0..self.keys.len()).any(|i| find(&mut comp, i) != root) {
            return Err(Error::Profile(format!(
                "widths {:?} cannot form a connected polytree",
                self.profile.widths
            )));
        }
        Ok(())
    }

    /// Allocates shared and private vertices; returns the inner count.
    fn vertices(&mut self) -> Result<usize> {
        let mut next = 0;
        self.verts = vec![BTreeSet::new(); self.keys.len()];
        for &(p, c) in &self.links {
            self.shared.push(next);
            self.verts[p].insert(next);
            self.verts[c].insert(next);
            next += 1;
        }
        for n in 0..self.keys.len() {
            let parents = self.links.iter().filter(|l| l.1 == n).count();
            let children = self.links.iter().filter(|l| l.0 == n).count();
            let need = parents + children + 1;
            if need > self.profile.max_size {
                return Err(Error::Profile(format!(
                    "node {} has {parents} parents and {children} children, so its vertex count must exceed {} \
                     (|V| > parents + children), but the size range allows at most {}",
                    self.keys[n],
                    parents + children,
                    self.profile.max_size
                )));
            }
            let size = self.rng.gen_range(need.max(self.profile.min_size)..=self.profile.max_size);
            for _ in self.verts[n].len()..size {
                self.verts[n].insert(next);
                next += 1;
            }
        }
        Ok(next)
    }

    fn descend(&mut self, child: usize, shared: usize, targets: &mut BTreeSet<usize>) {
        let exclude = self.child_shared(child);
        targets.extend(self.verts[child].iter().filter(|v| **v != shared && !exclude.contains(v)));
        let below: Vec<(usize, usize)> = self.child_links(child).collect();
        for (c, x) in below {
            self.branch(c, x, targets);
        }
    }

    fn branch(&mut self, child: usize, shared: usize, targets: &mut BTreeSet<usize>) {
        if self.rng.gen_bool(0.5) {
            targets.insert(shared);
        } else {
            self.descend(child, shared, targets);
        }
    }

    fn targets(&mut self, home: usize, root: usize) -> BTreeSet<usize> {
        let exclude = self.child_shared(home);
        let mut targets: BTreeSet<usize> = self.verts[home]
            .iter()
            .copied()
            .filter(|v| *v != root && !exclude.contains(v))
            .collect();
        let below: Vec<(usize, usize)> = self.child_links(home).collect();
        for (c, x) in below {
            if x != root {
                self.branch(c, x, &mut targets);
            }
        }
        targets
    }
}

/// Generates an instance with a decomposition that verifies. The same
/// profile and seed always give the same instance.
pub fn random_oic(profile: &Profile, seed: u64) -> Result<GeneratedOic> {
    profile.validate()?;
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        keys: Vec::new(),
        links: Vec::new(),
        shared: Vec::new(),
        verts: Vec::new(),
        profile,
    };
    b.polytree()?;
    let inner_count = b.vertices()?;

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut gadgets: Vec<Gadget> = Vec::new();
    let mut next = inner_count;
    let mut ni_left = profile.max_non_inner;

    for home in 0..b.keys.len() {
        let parent_shared = b.parent_shared(home);
        let roots: Vec<usize> = b.verts[home].difference(&parent_shared).copied().collect();
        for root in roots {
            let targets = b.targets(home, root);
            let mut remaining: Vec<usize> = targets.into_iter().collect();
            remaining.shuffle(&mut b.rng);
            while let Some(&t) = remaining.first() {
                let left: BTreeSet<usize> = remaining.iter().copied().collect();
                let reusable: Vec<usize> = (0..gadgets.len())
                    .filter(|&g| gadgets[g].termini.contains(&t) && gadgets[g].termini.is_subset(&left))
                    .collect();
                let roll: f64 = b.rng.gen();
                let covered: BTreeSet<usize> = if !reusable.is_empty() && roll < 0.3 {
                    let g = &gadgets[*reusable.choose(&mut b.rng).unwrap()];
                    edges.insert((root, g.id));
                    g.termini.clone()
                } else if ni_left > 0 && roll < 0.6 {
                    let homes: Vec<usize> = (0..b.keys.len()).filter(|&n| b.verts[n].contains(&t)).collect();
                    let m = *homes.choose(&mut b.rng).unwrap();
                    let mut block: Vec<usize> = vec![t];
                    for &v in &remaining[1..] {
                        if b.verts[m].contains(&v) && b.rng.gen_bool(0.5) {
                            block.push(v);
                        }
                    }
                    let chain = ni_left >= 2 && block.len() >= 2 && b.rng.gen_bool(0.4);
                    let top = if chain {
                        let split = b.rng.gen_range(1..block.len());
                        let lower = next;
                        let upper = next + 1;
                        next += 2;
                        ni_left -= 2;
                        for &v in &block[..split] {
                            edges.insert((lower, v));
                        }
                        edges.insert((upper, lower));
                        for &v in &block[split..] {
                            edges.insert((upper, v));
                        }
                        gadgets.push(Gadget {
                            id: lower,
                            termini: block[..split].iter().copied().collect(),
                        });
                        upper
                    } else {
                        let id = next;
                        next += 1;
                        ni_left -= 1;
                        for &v in &block {
                            edges.insert((id, v));
                        }
                        id
                    };
                    let termini: BTreeSet<usize> = block.into_iter().collect();
                    gadgets.push(Gadget {
                        id: top,
                        termini: termini.clone(),
                    });
                    edges.insert((root, top));
                    termini
                } else {
                    edges.insert((root, t));
                    BTreeSet::from([t])
                };
                remaining.retain(|v| !covered.contains(v));
            }
        }
    }

    let k = next;
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(&mut b.rng);
    let graph = Digraph::new(k, edges.iter().map(|&(u, v)| (perm[u], perm[v])))?;
    let nodes = (0..b.keys.len())
        .map(|n| DecompNode {
            key: b.keys[n],
            vertices: b.verts[n].iter().map(|&v| VertexId(perm[v])).collect(),
        })
        .collect();
    let tree_edges = b
        .links
        .iter()
        .zip(&b.shared)
        .map(|(&(p, c), &x)| TreeEdge {
            parent: b.keys[p],
            child: b.keys[c],
            shared: VertexId(perm[x]),
        })
        .collect();
    let decomposition = PolytreeDecomposition::new(nodes, tree_edges)?;

    let report = verify_oic(&graph, &decomposition);
    if let Some(fail) = report.first_failure() {
        return Err(Error::Profile(format!(
            "generated instance for {profile} seed {seed} failed {}: {}",
            fail.id,
            fail.witness.as_ref().map(|w| w.to_string()).unwrap_or_default()
        )));
    }
    Ok(GeneratedOic {
        instance: SuicpInstance::new(graph, 1)?,
        decomposition,
        seed,
    })
}
