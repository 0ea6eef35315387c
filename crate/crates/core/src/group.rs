//! Finite groups given by full multiplication tables.

use crate::error::{Error, Result};

/// Largest group order accepted for tabled groups.
pub const GROUP_CAP: usize = 64;

pub type Elem = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    labels: Vec<String>,
    mul: Vec<Elem>,
    inv: Vec<Elem>,
    id: Elem,
    abelian: bool,
}

impl FiniteGroup {
    /// Validates a table: `mul[a][b]` is the product `a·b`.
    pub fn from_table(labels: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::BadTable("empty group".into()));
        }
        if n > GROUP_CAP {
            return Err(Error::GroupTooLarge(n, GROUP_CAP));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::BadTable(format!("duplicate label `{}`", l)));
            }
        }
        if mul.len() != n || mul.iter().any(|r| r.len() != n) {
            return Err(Error::BadTable(format!("table must be {}x{}", n, n)));
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &mul {
            for &v in row {
                if v >= n {
                    return Err(Error::BadTable(format!("entry {} out of range", v)));
                }
                flat.push(v as Elem);
            }
        }
        let at = |a: usize, b: usize| flat[a * n + b] as usize;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::NotAssociative(labels[a].clone(), labels[b].clone(), labels[c].clone()));
                    }
                }
            }
        }
        let id = (0..n).find(|&e| (0..n).all(|a| at(e, a) == a && at(a, e) == a)).ok_or(Error::NoIdentity)?;
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            let b = (0..n).find(|&b| at(a, b) == id && at(b, a) == id).ok_or_else(|| Error::NoInverse(labels[a].clone()))?;
            inv.push(b as Elem);
        }
        let abelian = (0..n).all(|a| (0..n).all(|b| at(a, b) == at(b, a)));
        Ok(FiniteGroup { labels, mul: flat, inv, id: id as Elem, abelian })
    }

    /// Builds a group from a set of elements and a product function.
    pub fn from_fn<T: Clone + PartialEq>(elements: &[T], label: impl Fn(&T) -> String, op: impl Fn(&T, &T) -> T) -> Result<Self> {
        let labels = elements.iter().map(&label).collect();
        let mut table = Vec::with_capacity(elements.len());
        for a in elements {
            let mut row = Vec::with_capacity(elements.len());
            for b in elements {
                let c = op(a, b);
                let k = elements.iter().position(|e| *e == c).ok_or_else(|| Error::BadTable("product leaves the element set".into()))?;
                row.push(k);
            }
            table.push(row);
        }
        FiniteGroup::from_table(labels, table)
    }

    pub fn trivial() -> Self {
        FiniteGroup::cyclic(1)
    }

    /// `ℤ/n` with labels `0..n-1`.
    pub fn cyclic(n: usize) -> Self {
        let els: Vec<usize> = (0..n).collect();
        FiniteGroup::from_fn(&els, |a| a.to_string(), |a, b| (a + b) % n).expect("cyclic group")
    }

    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let els: Vec<(Elem, Elem)> = a.elements().flat_map(|x| b.elements().map(move |y| (x, y))).collect();
        FiniteGroup::from_fn(
            &els,
            |&(x, y)| format!("({},{})", a.label(x), b.label(y)),
            |&(x1, y1), &(x2, y2)| (a.mul(x1, x2), b.mul(y1, y2)),
        )
    }

    /// Permutations of three letters, labelled by their images of `123`.
    pub fn symmetric3() -> Self {
        let mut perms: Vec<[u8; 3]> = Vec::new();
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    if a != b && b != c && a != c {
                        perms.push([a, b, c]);
                    }
                }
            }
        }
        FiniteGroup::from_fn(
            &perms,
            |p| p.iter().map(|&i| char::from(b'1' + i)).collect(),
            |p, q| [p[q[0] as usize], p[q[1] as usize], p[q[2] as usize]],
        )
        .expect("S3")
    }

    /// Unitriangular 3x3 matrices over `ℤ/2`; `[x,y,z]` is the matrix with
    /// `x` at (1,2), `y` at (1,3) and `z` at (2,3).
    pub fn heisenberg() -> Self {
        let mut els = Vec::new();
        for x in 0..2u8 {
            for y in 0..2u8 {
                for z in 0..2u8 {
                    els.push((x, y, z));
                }
            }
        }
        FiniteGroup::from_fn(
            &els,
            |&(x, y, z)| format!("[{}{}{}]", x, y, z),
            |&(x1, y1, z1), &(x2, y2, z2)| ((x1 + x2) % 2, (y1 + y2 + x1 * z2) % 2, (z1 + z2) % 2),
        )
        .expect("Heisenberg group")
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}`.
    pub fn quaternion() -> Self {
        // (sign, unit) with unit 0=1, 1=i, 2=j, 3=k
        let mut els = Vec::new();
        for s in 0..2u8 {
            for u in 0..4u8 {
                els.push((s, u));
            }
        }
        let unit = |a: u8, b: u8| -> (u8, u8) {
            match (a, b) {
                (0, x) | (x, 0) => (0, x),
                (x, y) if x == y => (1, 0),
                (1, 2) => (0, 3),
                (2, 3) => (0, 1),
                (3, 1) => (0, 2),
                (2, 1) => (1, 3),
                (3, 2) => (1, 1),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            }
        };
        let names = ["1", "i", "j", "k"];
        FiniteGroup::from_fn(
            &els,
            |&(s, u)| format!("{}{}", if s == 1 { "-" } else { "" }, names[u as usize]),
            |&(s1, u1), &(s2, u2)| {
                let (s, u) = unit(u1, u2);
                ((s1 + s2 + s) % 2, u)
            },
        )
        .expect("Q8")
    }

    /// Dihedral group of order `2n`; `r^k` and `sr^k`.
    pub fn dihedral(n: usize) -> Self {
        let mut els = Vec::new();
        for s in 0..2usize {
            for k in 0..n {
                els.push((s, k));
            }
        }
        FiniteGroup::from_fn(
            &els,
            |&(s, k)| format!("{}r{}", if s == 1 { "s" } else { "" }, k),
            |&(s1, k1), &(s2, k2)| {
                // s^s1 r^k1 s^s2 r^k2 = s^(s1+s2) r^(±k1 + k2)
                let k = if s2 == 1 { (n - k1 % n + k2) % n } else { (k1 + k2) % n };
                ((s1 + s2) % 2, k)
            },
        )
        .expect("dihedral group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        0..self.labels.len() as Elem
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.labels.len() + b as usize]
    }

    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    pub fn id(&self) -> Elem {
        self.id
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn label(&self, a: Elem) -> &str {
        &self.labels[a as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn element(&self, label: &str) -> Option<Elem> {
        self.labels.iter().position(|l| l == label).map(|i| i as Elem)
    }

    /// The full table as nested rows.
    pub fn table(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n).map(|a| (0..n).map(|b| self.mul[a * n + b] as usize).collect()).collect()
    }

    pub fn conj(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.id {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_central(&self, a: Elem) -> bool {
        self.elements().all(|b| self.mul(a, b) == self.mul(b, a))
    }

    pub fn center(&self) -> Vec<Elem> {
        self.elements().filter(|&a| self.is_central(a)).collect()
    }

    pub fn is_subgroup(&self, members: &[Elem]) -> bool {
        members.contains(&self.id) && members.iter().all(|&a| members.iter().all(|&b| members.contains(&self.mul(a, self.inv(b)))))
    }

    pub fn is_normal(&self, members: &[Elem]) -> bool {
        self.is_subgroup(members) && members.iter().all(|&n| self.elements().all(|g| members.contains(&self.conj(g, n))))
    }

    /// Subgroup generated by the given elements, sorted.
    pub fn generated(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut set = vec![self.id];
        let mut frontier = vec![self.id];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.contains(&y) {
                    set.push(y);
                    frontier.push(y);
                }
            }
        }
        set.sort_unstable();
        set
    }

    /// The subgroup on `members` (kept in the given order) and its inclusion.
    pub fn subgroup(&self, members: &[Elem]) -> Result<(FiniteGroup, Vec<Elem>)> {
        if !self.is_subgroup(members) {
            return Err(Error::NotSubgroup(format!("{:?}", members)));
        }
        let sub = FiniteGroup::from_fn(members, |&a| self.label(a).to_string(), |&a, &b| self.mul(a, b))?;
        Ok((sub, members.to_vec()))
    }

    /// Quotient by a normal subgroup; cosets are labelled by their smallest
    /// member.  Returns the quotient and the projection table.
    pub fn quotient(&self, normal: &[Elem]) -> Result<(FiniteGroup, Vec<Elem>)> {
        if !self.is_normal(normal) {
            return Err(Error::NotNormal(format!("{:?}", normal)));
        }
        let rep = |a: Elem| normal.iter().map(|&n| self.mul(a, n)).min().expect("nonempty");
        let mut reps: Vec<Elem> = self.elements().map(rep).collect();
        reps.sort_unstable();
        reps.dedup();
        let q = FiniteGroup::from_fn(&reps, |&a| self.label(a).to_string(), |&a, &b| rep(self.mul(a, b)))?;
        let proj = self.elements().map(|a| reps.iter().position(|&r| r == rep(a)).expect("coset") as Elem).collect();
        Ok((q, proj))
    }
}

/// Checks that `map` is a homomorphism `src -> tgt`.
pub fn check_hom(src: &FiniteGroup, tgt: &FiniteGroup, map: &[Elem]) -> Result<()> {
    if map.len() != src.order() {
        return Err(Error::NotHomomorphism(format!("table has {} entries for a group of order {}", map.len(), src.order())));
    }
    if let Some(&v) = map.iter().find(|&&v| v as usize >= tgt.order()) {
        return Err(Error::NotHomomorphism(format!("image {} out of range", v)));
    }
    for a in src.elements() {
        for b in src.elements() {
            if map[src.mul(a, b) as usize] != tgt.mul(map[a as usize], map[b as usize]) {
                return Err(Error::NotHomomorphism(format!(
                    "f({}·{}) != f({})·f({})",
                    src.label(a),
                    src.label(b),
                    src.label(a),
                    src.label(b)
                )));
            }
        }
    }
    Ok(())
}

/// Elementary divisors of a finite abelian group computed from element
/// orders only: the number of solutions of `n·x = 0` determines the group.
pub fn abelian_invariants_by_counting(orders: &[usize]) -> Vec<u64> {
    let total = orders.len() as u64;
    let mut factors: Vec<u64> = Vec::new();
    let mut m = total;
    let mut p = 2;
    let mut primes = Vec::new();
    while m > 1 {
        if m.is_multiple_of(p) {
            primes.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    // For each prime, |G[p^k]| gives the conjugate partition of the p-part.
    let mut parts_by_prime: Vec<(u64, Vec<u32>)> = Vec::new();
    for &p in &primes {
        let mut logs = vec![0u32];
        let mut k = 1;
        loop {
            let pk = p.pow(k);
            let count = orders.iter().filter(|&&o| pk % o as u64 == 0 && (o as u64) <= pk).count() as u64;
            let count = count.max(1);
            let mut l = 0;
            let mut c = count;
            while c.is_multiple_of(p) && c > 1 {
                c /= p;
                l += 1;
            }
            logs.push(l);
            if logs[k as usize] == logs[k as usize - 1] {
                break;
            }
            k += 1;
        }
        // conj[k] = logs[k+1]-logs[k] = number of cyclic factors of order >= p^(k+1)
        let conj: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).filter(|&d| d > 0).collect();
        let n_factors = conj.first().copied().unwrap_or(0);
        let mut exps = Vec::new();
        for i in 0..n_factors {
            exps.push(conj.iter().filter(|&&c| c > i).count() as u32);
        }
        parts_by_prime.push((p, exps));
    }
    let width = parts_by_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    for i in 0..width {
        let mut f = 1u64;
        for (p, exps) in &parts_by_prime {
            if let Some(&e) = exps.get(i) {
                f *= p.pow(e);
            }
        }
        factors.push(f);
    }
    // invariant factors in divisibility order d1 | d2 | ...
    factors.reverse();
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_center_has_order_two() {
        let h = FiniteGroup::heisenberg();
        assert_eq!(h.order(), 8);
        assert!(!h.is_abelian());
        let z = h.center();
        assert_eq!(z.len(), 2);
        let (q, _) = h.quotient(&z).unwrap();
        assert!(q.is_abelian());
        assert_eq!(q.order(), 4);
        assert!(q.elements().all(|x| q.element_order(x) <= 2));
    }

    #[test]
    fn s3_center_trivial() {
        let s = FiniteGroup::symmetric3();
        assert_eq!(s.center(), vec![s.id()]);
        let a3 = s.generated(&[s.element("231").unwrap()]);
        assert_eq!(a3.len(), 3);
        assert!(s.is_normal(&a3));
        assert!(!a3.iter().all(|&a| s.is_central(a)));
    }

    #[test]
    fn small_groups() {
        assert_eq!(FiniteGroup::quaternion().center().len(), 2);
        assert_eq!(FiniteGroup::dihedral(4).center().len(), 2);
        assert_eq!(FiniteGroup::dihedral(4).order(), 8);
        assert!(!FiniteGroup::quaternion().is_abelian());
    }

    #[test]
    fn rejects_non_associative() {
        // a Latin square with identity 0 that is not associative
        let t = vec![vec![0, 1, 2, 3, 4], vec![1, 0, 3, 4, 2], vec![2, 4, 0, 1, 3], vec![3, 2, 4, 0, 1], vec![4, 3, 1, 2, 0]];
        let labels = (0..5).map(|i| i.to_string()).collect();
        assert!(matches!(FiniteGroup::from_table(labels, t), Err(Error::NotAssociative(..))));
    }

    #[test]
    fn counting_invariants() {
        let z4 = FiniteGroup::cyclic(4);
        let k = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)).unwrap();
        let z2z4 = FiniteGroup::product(&FiniteGroup::cyclic(2), &z4).unwrap();
        let z6 = FiniteGroup::cyclic(6);
        let orders = |g: &FiniteGroup| g.elements().map(|a| g.element_order(a)).collect::<Vec<_>>();
        assert_eq!(abelian_invariants_by_counting(&orders(&z4)), vec![4]);
        assert_eq!(abelian_invariants_by_counting(&orders(&k)), vec![2, 2]);
        assert_eq!(abelian_invariants_by_counting(&orders(&z2z4)), vec![2, 4]);
        assert_eq!(abelian_invariants_by_counting(&orders(&z6)), vec![6]);
        assert_eq!(abelian_invariants_by_counting(&[1]), Vec::<u64>::new());
    }

    #[test]
    fn hom_check() {
        let z4 = FiniteGroup::cyclic(4);
        let z2 = FiniteGroup::cyclic(2);
        assert!(check_hom(&z4, &z2, &[0, 1, 0, 1]).is_ok());
        assert!(check_hom(&z4, &z2, &[0, 1, 1, 0]).is_err());
    }
}
