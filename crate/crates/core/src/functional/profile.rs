use std::collections::HashMap;

use serde::Serialize;

use crate::error::{usage, Error, Result};
use crate::group::{GroupDescriptor, GroupElement};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileMode {
    /// Indicators of connected sets containing the identity.
    SetsOnly,
    /// Functions with values in `1..=max` on such a set.
    IntegerValued(u32),
}

/// The best ratio `‖f‖_1 / ‖∇^l f‖_1` over supports of size at most `n`.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub n: usize,
    pub value_num: i128,
    pub value_den: i128,
    pub witness: Vec<String>,
    /// Function values on the witness, in witness order; all ones for sets.
    pub values: Vec<u32>,
}

impl ProfileRow {
    pub fn value(&self) -> Rational {
        Rational::new(self.value_num, self.value_den)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileReport {
    pub group: String,
    pub mode: String,
    /// How the denominator is computed.
    pub convention: &'static str,
    /// True for integer-valued searches, where connected supports are a restriction rather than a reduction.
    pub restricted: bool,
    pub searched: u64,
    pub rows: Vec<ProfileRow>,
}

pub const CONVENTION: &str = "left l1 gradient: sum over s in S and g of |f(g) - f(s^-1 g)|; for an indicator this is sum_s |A symmetric-difference sA|";

struct Graph {
    elements: Vec<GroupElement>,
    neighbors: Vec<Vec<Option<usize>>>,
}

impl Graph {
    fn build(group: &GroupDescriptor, radius: u32) -> Result<Graph> {
        let elements = group.ball(radius)?;
        let index: HashMap<&GroupElement, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let neighbors = elements
            .iter()
            .map(|g| group.generators().iter().map(|s| index.get(&group.mul(s, g)).copied()).collect())
            .collect();
        Ok(Graph { elements, neighbors })
    }
}

struct Search<'a> {
    graph: &'a Graph,
    gens: usize,
    max_size: usize,
    mode: ProfileMode,
    limit: u64,
    searched: u64,
    /// Best `(numerator, denominator, set, values)` per exact support size.
    best: Vec<Option<(i128, i128, Vec<usize>, Vec<u32>)>>,
    in_set: Vec<bool>,
    seen: Vec<bool>,
    set: Vec<usize>,
}

impl Search<'_> {
    fn offer(&mut self, size: usize, num: i128, den: i128, values: Vec<u32>) {
        let better = match &self.best[size] {
            None => true,
            Some((n0, d0, _, _)) => num * d0 > n0 * den,
        };
        if better {
            self.best[size] = Some((num, den, self.set.clone(), values));
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.searched += 1;
        if self.searched > self.limit {
            return Err(Error::ResourceExhausted {
                what: format!("profile search{}", self.best_so_far()),
                reached: self.searched,
            });
        }
        Ok(())
    }

    fn best_so_far(&self) -> String {
        let mut out = String::new();
        for (n, b) in self.best.iter().enumerate() {
            if let Some((num, den, _, _)) = b {
                out.push_str(&format!("; best so far at n={n}: {}", Rational::new(*num, *den)));
            }
        }
        out
    }

    fn evaluate(&mut self, boundary: i128) -> Result<()> {
        let size = self.set.len();
        match self.mode {
            ProfileMode::SetsOnly => {
                self.tick()?;
                self.offer(size, size as i128, 2 * boundary, vec![1; size]);
            }
            ProfileMode::IntegerValued(max) => {
                let mut values = vec![1u32; size];
                let mut pos: HashMap<usize, usize> = HashMap::new();
                for (i, &v) in self.set.iter().enumerate() {
                    pos.insert(v, i);
                }
                loop {
                    self.tick()?;
                    let (num, den) = self.integer_ratio(&values, &pos);
                    self.offer(size, num, den, values.clone());
                    let mut i = 0;
                    while i < size && values[i] == max {
                        values[i] = 1;
                        i += 1;
                    }
                    if i == size {
                        break;
                    }
                    values[i] += 1;
                }
            }
        }
        Ok(())
    }

    /// `‖f‖_1` and `‖∇^l f‖_1`. Edges inside the support are met in both orders by the
    /// loop; edges leaving it are met once and doubled.
    fn integer_ratio(&self, values: &[u32], pos: &HashMap<usize, usize>) -> (i128, i128) {
        let num: i128 = values.iter().map(|&v| v as i128).sum();
        let (mut inner, mut outer) = (0i128, 0i128);
        for (i, &v) in self.set.iter().enumerate() {
            for nb in &self.graph.neighbors[v] {
                match nb.and_then(|w| pos.get(&w)) {
                    Some(&j) => inner += (values[i] as i128 - values[j] as i128).abs(),
                    None => outer += values[i] as i128,
                }
            }
        }
        (num, inner + 2 * outer)
    }

    /// Redelmeier's enumeration of connected sets containing the root, each visited once.
    fn extend(&mut self, mut untried: Vec<usize>, boundary: i128) -> Result<()> {
        while let Some(v) = untried.pop() {
            let degree = self.graph.neighbors[v].iter().flatten().filter(|&&w| self.in_set[w]).count() as i128;
            let boundary_v = boundary + self.gens as i128 - 2 * degree;
            self.in_set[v] = true;
            self.set.push(v);
            self.evaluate(boundary_v)?;
            if self.set.len() < self.max_size {
                let mut next = untried.clone();
                let mut added = Vec::new();
                for w in self.graph.neighbors[v].iter().flatten() {
                    if !self.seen[*w] {
                        self.seen[*w] = true;
                        added.push(*w);
                        next.push(*w);
                    }
                }
                self.extend(next, boundary_v)?;
                for w in added {
                    self.seen[w] = false;
                }
            }
            self.set.pop();
            self.in_set[v] = false;
        }
        Ok(())
    }
}

/// Exhaustive profile search over connected supports containing the identity.
///
/// Row `n` holds the best ratio over supports of size at most `n`, so the
/// values are nondecreasing by construction. Row 0 is the empty support.
pub fn isoperimetric_profile(group: &GroupDescriptor, n: usize, mode: ProfileMode) -> Result<ProfileReport> {
    if let ProfileMode::IntegerValued(0) = mode {
        return usage("integer-valued profile needs a positive maximum value");
    }
    let mut rows = vec![ProfileRow {
        n: 0,
        value_num: 0,
        value_den: 1,
        witness: Vec::new(),
        values: Vec::new(),
    }];
    let mut searched = 0;
    if n > 0 {
        let graph = Graph::build(group, (n - 1) as u32)?;
        let root = graph.elements.iter().position(|g| *g == group.identity()).expect("ball contains the identity");
        let mut search = Search {
            graph: &graph,
            gens: group.generators().len(),
            max_size: n,
            mode,
            limit: group.budget().max_items(64),
            searched: 0,
            best: vec![None; n + 1],
            in_set: vec![false; graph.elements.len()],
            seen: vec![false; graph.elements.len()],
            set: Vec::new(),
        };
        search.seen[root] = true;
        search.extend(vec![root], 0)?;
        searched = search.searched;
        for size in 1..=n {
            let prev = rows.last().expect("row 0 exists").clone();
            let row = match &search.best[size] {
                Some((num, den, set, values)) if Rational::new(*num, *den) > prev.value() => {
                    let q = Rational::new(*num, *den);
                    ProfileRow {
                        n: size,
                        value_num: *q.numer(),
                        value_den: *q.denom(),
                        witness: set.iter().map(|&i| group.format_element(&graph.elements[i])).collect(),
                        values: values.clone(),
                    }
                }
                _ => ProfileRow { n: size, ..prev },
            };
            rows.push(row);
        }
    }
    Ok(ProfileReport {
        group: group.family().name(),
        mode: match mode {
            ProfileMode::SetsOnly => "sets".into(),
            ProfileMode::IntegerValued(v) => format!("int:{v}"),
        },
        convention: CONVENTION,
        restricted: matches!(mode, ProfileMode::IntegerValued(_)),
        searched,
        rows,
    })
}
