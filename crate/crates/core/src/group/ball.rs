use std::collections::HashMap;
use std::io::Write;

use super::{Element, Group, GroupError};

/// Deterministic enumeration of `{t : ℓ(t) ≤ R}`.
///
/// Elements are ordered by length, and within each sphere by the canonical
/// order on [`Element`]; index 0 is always the identity.
#[derive(Clone, Debug)]
pub struct Ball {
    radius: usize,
    elements: Vec<Element>,
    lengths: Vec<usize>,
    index: HashMap<Element, usize>,
    /// `(parent index, generator index)` with `parent · s_gen = element`.
    parents: Vec<Option<(usize, usize)>>,
    /// `neighbors[i][g]` is the index of `elements[i] · s_g` when it lies in the ball.
    neighbors: Vec<Vec<Option<usize>>>,
    sphere_starts: Vec<usize>,
    exhaustive: bool,
}

impl Ball {
    pub(super) fn enumerate(group: &Group, radius: usize) -> Result<Ball, GroupError> {
        let cap = group.limits().ball_size_cap;
        let gens = group.generators();
        let e = group.identity();
        let mut elements = vec![e.clone()];
        let mut lengths = vec![0];
        let mut parents = vec![None];
        let mut index = HashMap::from([(e, 0usize)]);
        let mut sphere_starts = vec![0];
        let mut exhaustive = false;

        for r in 1..=radius {
            let prev = sphere_starts[r - 1]..elements.len();
            let mut found: HashMap<Element, (usize, usize)> = HashMap::new();
            for p in prev {
                for (g, s) in gens.iter().enumerate() {
                    let t = group.multiply(&elements[p], s)?;
                    if !index.contains_key(&t) {
                        found.entry(t).or_insert((p, g));
                    }
                }
            }
            sphere_starts.push(elements.len());
            if found.is_empty() {
                exhaustive = true;
                // keep sphere_starts aligned with every radius up to R
                for _ in r + 1..=radius {
                    sphere_starts.push(elements.len());
                }
                break;
            }
            let size = elements.len() + found.len();
            if size > cap {
                return Err(GroupError::BallTooLarge { radius, size, cap });
            }
            let mut sphere: Vec<(Element, (usize, usize))> = found.into_iter().collect();
            sphere.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            for (t, parent) in sphere {
                index.insert(t.clone(), elements.len());
                elements.push(t);
                lengths.push(r);
                parents.push(Some(parent));
            }
        }
        if !exhaustive && group.is_finite() && group.order() == Some(elements.len()) {
            exhaustive = true;
        }

        let neighbors = elements
            .iter()
            .map(|t| {
                gens.iter()
                    .map(|s| Ok(index.get(&group.multiply(t, s)?).copied()))
                    .collect::<Result<Vec<_>, GroupError>>()
            })
            .collect::<Result<Vec<_>, GroupError>>()?;

        Ok(Ball { radius, elements, lengths, index, parents, neighbors, sphere_starts, exhaustive })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn length(&self, i: usize) -> usize {
        self.lengths[i]
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn index_of(&self, t: &Element) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn contains(&self, t: &Element) -> bool {
        self.index.contains_key(t)
    }

    /// Neighbor `t·s_g` of element `i`, if it lies in the ball.
    pub fn neighbor(&self, i: usize, g: usize) -> Option<usize> {
        self.neighbors[i][g]
    }

    pub fn neighbors(&self, i: usize) -> &[Option<usize>] {
        &self.neighbors[i]
    }

    /// Index of the BFS parent of element `i` and the generator leading to it.
    pub fn parent(&self, i: usize) -> Option<(usize, usize)> {
        self.parents[i]
    }

    /// Geodesic word (generator indices) for element `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.lengths[i]);
        while let Some((p, g)) = self.parents[i] {
            w.push(g);
            i = p;
        }
        w.reverse();
        w
    }

    /// Indices of the sphere of radius `r`.
    pub fn sphere(&self, r: usize) -> std::ops::Range<usize> {
        if r > self.radius {
            return self.len()..self.len();
        }
        let start = self.sphere_starts[r];
        let end = self.sphere_starts.get(r + 1).copied().unwrap_or(self.len());
        start..end
    }

    /// Whether the ball covers the entire (finite) group.
    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    /// Writes the CSV dump `index,canonical_string,length`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,canonical_string,length")?;
        for (i, t) in self.elements.iter().enumerate() {
            writeln!(w, "{},\"{}\",{}", i, t, self.lengths[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_ball_sizes() {
        let f2 = Group::free(2);
        assert_eq!(f2.ball(0).unwrap().len(), 1);
        assert_eq!(f2.ball(1).unwrap().len(), 5);
        let b2 = f2.ball(2).unwrap();
        assert_eq!(b2.len(), 17);
        assert_eq!(b2.sphere(2).len(), 12);
        assert_eq!(b2.element(0), &f2.identity());
    }

    #[test]
    fn zn_ball() {
        assert_eq!(Group::zn(2).ball(1).unwrap().len(), 5);
        assert_eq!(Group::zn(2).ball(2).unwrap().len(), 13);
    }

    #[test]
    fn spheres_are_sorted_and_words_rebuild() {
        let g = Group::sl2z();
        let b = g.ball(4).unwrap();
        for r in 0..=4 {
            let s = &b.elements()[b.sphere(r)];
            assert!(s.windows(2).all(|p| p[0] < p[1]));
        }
        for i in 0..b.len() {
            let w = b.word(i);
            assert_eq!(w.len(), b.length(i));
            let t = g.product(w.iter().map(|&k| &g.generators()[k])).unwrap();
            assert_eq!(&t, b.element(i));
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = Group::free(3).with_limits(crate::group::GroupLimits { ball_size_cap: 50, length_radius_cap: 4 });
        assert!(matches!(g.ball(3), Err(GroupError::BallTooLarge { .. })));
    }

    #[test]
    fn finite_ball_is_exhaustive() {
        let z5 = Group::cyclic(5).unwrap();
        let b = z5.ball(10).unwrap();
        assert_eq!(b.len(), 5);
        assert!(b.is_exhaustive());
        assert_eq!(b.sphere(7).len(), 0);
    }

    #[test]
    fn csv_dump() {
        let mut out = Vec::new();
        Group::zn(2).ball(1).unwrap().write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("index,canonical_string,length\n0,\"(0,0)\",0"));
    }
}
