//! Smith normal form over ℤ with unimodular transforms, and the finite
//! abelian group bookkeeping built on it.

use crate::error::{Error, Result};

pub type Int = i128;
pub type Matrix = Vec<Vec<Int>>;

fn add(a: Int, b: Int) -> Result<Int> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn mul(a: Int, b: Int) -> Result<Int> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub fn zeros(r: usize, c: usize) -> Matrix {
    vec![vec![0; c]; r]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn cols(m: &Matrix, fallback: usize) -> usize {
    m.first().map(|r| r.len()).unwrap_or(fallback)
}

pub fn mat_mul(a: &Matrix, b: &Matrix, inner: usize) -> Result<Matrix> {
    let n = cols(b, 0);
    let mut out = zeros(a.len(), n);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            let x = row[k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] = add(out[i][j], mul(x, b[k][j])?)?;
            }
        }
    }
    Ok(out)
}

pub fn mat_vec(a: &Matrix, v: &[Int]) -> Result<Vec<Int>> {
    let mut out = vec![0; a.len()];
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x != 0 && v[j] != 0 {
                out[i] = add(out[i], mul(x, v[j])?)?;
            }
        }
    }
    Ok(out)
}

/// `U · A · V = diag(d)`, with `d[i] | d[i+1]` among the nonzero entries.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<Int>,
    pub rank: usize,
    pub u: Matrix,
    pub u_inv: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
}

struct Work {
    a: Matrix,
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
    v_inv: Matrix,
    m: usize,
    n: usize,
    track_u: bool,
    rhs: Vec<Vec<Int>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        for b in self.rhs.iter_mut() {
            b.swap(i, j);
        }
        if self.track_u {
            self.u.swap(i, j);
            for row in self.u_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// row_i -= q · row_t
    fn row_sub(&mut self, i: usize, t: usize, q: Int) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for j in 0..self.n {
            let d = mul(q, self.a[t][j])?;
            self.a[i][j] = add(self.a[i][j], -d)?;
        }
        for b in self.rhs.iter_mut() {
            let d = mul(q, b[t])?;
            b[i] = add(b[i], -d)?;
        }
        if !self.track_u {
            return Ok(());
        }
        for j in 0..self.m {
            let d = mul(q, self.u[t][j])?;
            self.u[i][j] = add(self.u[i][j], -d)?;
        }
        // inverse: col_t += q · col_i
        for r in 0..self.m {
            let d = mul(q, self.u_inv[r][i])?;
            self.u_inv[r][t] = add(self.u_inv[r][t], d)?;
        }
        Ok(())
    }

    /// col_j -= q · col_t
    fn col_sub(&mut self, j: usize, t: usize, q: Int) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        for r in 0..self.m {
            let d = mul(q, self.a[r][t])?;
            self.a[r][j] = add(self.a[r][j], -d)?;
        }
        for r in 0..self.n {
            let d = mul(q, self.v[r][t])?;
            self.v[r][j] = add(self.v[r][j], -d)?;
        }
        // inverse: row_t += q · row_j
        for c in 0..self.n {
            let d = mul(q, self.v_inv[j][c])?;
            self.v_inv[t][c] = add(self.v_inv[t][c], d)?;
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -*x;
        }
        for b in self.rhs.iter_mut() {
            b[i] = -b[i];
        }
        if !self.track_u {
            return;
        }
        for x in self.u[i].iter_mut() {
            *x = -*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -row[i];
        }
    }
}

/// Smith normal form of an `m × n` matrix (`n` is needed when `m = 0`).
pub fn smith(a: &Matrix, n: usize) -> Result<Smith> {
    Ok(reduce(a, n, true, Vec::new())?.0)
}

/// Reduction without the row transforms; the row operations are applied
/// to the given right-hand sides instead, which come back as `U · b`.
fn reduce(a: &Matrix, n: usize, track_u: bool, rhs: Vec<Vec<Int>>) -> Result<(Smith, Vec<Vec<Int>>)> {
    let m = a.len();
    let (u, u_inv) = if track_u { (identity(m), identity(m)) } else { (Vec::new(), Vec::new()) };
    let mut w = Work { a: a.clone(), u, u_inv, v: identity(n), v_inv: identity(n), m, n, track_u, rhs };
    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize, Int)> = None;
        for i in t..m {
            for j in t..n {
                let x = w.a[i][j].abs();
                if x != 0 && best.is_none_or(|(_, _, b)| x < b) {
                    best = Some((i, j, x));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut changed = false;
            for i in (t + 1)..m {
                if w.a[i][t] != 0 {
                    let q = w.a[i][t].div_euclid(w.a[t][t]);
                    w.row_sub(i, t, q)?;
                    if w.a[i][t] != 0 {
                        w.swap_rows(t, i);
                        changed = true;
                    }
                }
            }
            for j in (t + 1)..n {
                if w.a[t][j] != 0 {
                    let q = w.a[t][j].div_euclid(w.a[t][t]);
                    w.col_sub(j, t, q)?;
                    if w.a[t][j] != 0 {
                        w.swap_cols(t, j);
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            let p = w.a[t][t];
            let mut bad = None;
            'scan: for i in (t + 1)..m {
                for j in (t + 1)..n {
                    if w.a[i][j] % p != 0 {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                // row_t += row_i brings a non-multiple into the pivot row
                Some(i) => w.row_sub(t, i, -1)?,
                None => break,
            }
        }
        if w.a[t][t] < 0 {
            w.negate_row(t);
        }
        t += 1;
    }
    let diag: Vec<Int> = (0..m.min(n)).map(|i| w.a[i][i]).collect();
    let rank = diag.iter().filter(|&&d| d != 0).count();
    Ok((Smith { diag, rank, u: w.u, u_inv: w.u_inv, v: w.v, v_inv: w.v_inv }, w.rhs))
}

/// Integer solution of `A x = b`, if any.
pub fn solve(a: &Matrix, n: usize, b: &[Int]) -> Result<Option<Vec<Int>>> {
    if b.len() != a.len() {
        return Err(Error::BadCochain("right-hand side has the wrong length".into()));
    }
    let (s, mut rhs) = reduce(a, n, false, vec![b.to_vec()])?;
    let ub = rhs.pop().expect("one right-hand side");
    let mut y = vec![0; n];
    for (i, &c) in ub.iter().enumerate() {
        if i < s.rank {
            let d = s.diag[i];
            if c % d != 0 {
                return Ok(None);
            }
            y[i] = c / d;
        } else if c != 0 {
            return Ok(None);
        }
    }
    Ok(Some(mat_vec(&s.v, &y)?))
}

/// Basis of the integer kernel of `A`, as column vectors.
pub fn kernel(a: &Matrix, n: usize) -> Result<Vec<Vec<Int>>> {
    let s = reduce(a, n, false, Vec::new())?.0;
    Ok((s.rank..n).map(|j| s.v.iter().map(|row| row[j]).collect()).collect())
}

/// Invariant factors (> 1) of the group `ℤ^r / span(columns of gens)`;
/// `None` when the quotient is infinite.
pub fn cokernel_invariants(gens: &[Vec<Int>], r: usize) -> Result<Option<Vec<Int>>> {
    let mut a = zeros(r, gens.len());
    for (j, g) in gens.iter().enumerate() {
        for i in 0..r {
            a[i][j] = g[i];
        }
    }
    let s = reduce(&a, gens.len(), false, Vec::new())?.0;
    if s.rank < r {
        return Ok(None);
    }
    Ok(Some(s.diag.into_iter().filter(|&d| d != 1).collect()))
}

/// A finite abelian group identified with `⊕ ℤ/d_i`.
#[derive(Clone, Debug)]
pub struct AbelianCoords {
    /// The moduli `d_i`, all `> 1`, in divisibility order.
    pub moduli: Vec<Int>,
    coords: Vec<Vec<Int>>,
    /// Element corresponding to each unit vector.
    pub basis: Vec<u32>,
}

impl AbelianCoords {
    /// Decomposes the group on `0..n` with identity `zero` and operation `op`.
    pub fn decompose(n: usize, zero: u32, op: impl Fn(u32, u32) -> u32) -> Result<Self> {
        // greedy generating set
        let mut gens: Vec<u32> = Vec::new();
        let mut span = vec![false; n];
        span[zero as usize] = true;
        for e in 0..n as u32 {
            if span[e as usize] {
                continue;
            }
            gens.push(e);
            let mut frontier: Vec<u32> = (0..n as u32).filter(|&x| span[x as usize]).collect();
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = op(x, g);
                    if !span[y as usize] {
                        span[y as usize] = true;
                        frontier.push(y);
                    }
                }
            }
        }
        let g = gens.len();
        // breadth-first coordinates in terms of the generators
        let mut coord: Vec<Option<Vec<Int>>> = vec![None; n];
        coord[zero as usize] = Some(vec![0; g]);
        let mut queue = std::collections::VecDeque::from([zero]);
        while let Some(x) = queue.pop_front() {
            for (i, &gi) in gens.iter().enumerate() {
                let y = op(x, gi);
                if coord[y as usize].is_none() {
                    let mut c = coord[x as usize].clone().expect("visited");
                    c[i] += 1;
                    coord[y as usize] = Some(c);
                    queue.push_back(y);
                }
            }
        }
        let coord: Vec<Vec<Int>> = coord.into_iter().map(|c| c.expect("generated")).collect();
        // Schreier relations x(a) + e_i - x(a + g_i)
        let mut rel: Matrix = Vec::new();
        for a in 0..n as u32 {
            for (i, &gi) in gens.iter().enumerate() {
                let b = op(a, gi);
                let mut r: Vec<Int> = (0..g).map(|j| coord[a as usize][j] - coord[b as usize][j]).collect();
                r[i] += 1;
                if r.iter().any(|&x| x != 0) {
                    rel.push(r);
                }
            }
        }
        let s = reduce(&rel, g, false, Vec::new())?.0;
        // y = V^{-1} x; relations become d_i y_i = 0.
        let diag: Vec<Int> = (0..g).map(|i| s.diag.get(i).copied().unwrap_or(0)).collect();
        if diag.contains(&0) {
            return Err(Error::BadTable("relation lattice is not of full rank".into()));
        }
        let keep: Vec<usize> = (0..g).filter(|&i| diag[i] != 1).collect();
        let moduli: Vec<Int> = keep.iter().map(|&i| diag[i]).collect();
        let coords: Vec<Vec<Int>> = coord
            .iter()
            .map(|x| {
                let y = mat_vec(&s.v_inv, x).expect("small entries");
                keep.iter().map(|&i| y[i].rem_euclid(diag[i])).collect()
            })
            .collect();
        let mut basis = Vec::with_capacity(keep.len());
        for k in 0..keep.len() {
            let e = (0..n)
                .find(|&a| coords[a].iter().enumerate().all(|(j, &c)| c == if j == k { 1 } else { 0 }))
                .expect("unit vector is realized");
            basis.push(e as u32);
        }
        Ok(AbelianCoords { moduli, coords, basis })
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn coords(&self, a: u32) -> &[Int] {
        &self.coords[a as usize]
    }

    /// The element with the given coordinates (reduced modulo the moduli).
    pub fn element(&self, c: &[Int]) -> u32 {
        let want: Vec<Int> = c.iter().zip(&self.moduli).map(|(x, d)| x.rem_euclid(*d)).collect();
        self.coords.iter().position(|x| *x == want).expect("coordinates are realized") as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_small_matrix() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&a, 3).unwrap();
        assert_eq!(s.diag, vec![2, 6, 12]);
        let uav = mat_mul(&mat_mul(&s.u, &a, 3).unwrap(), &s.v, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(uav[i][j], if i == j { s.diag[i] } else { 0 });
            }
        }
        let uu = mat_mul(&s.u, &s.u_inv, 3).unwrap();
        assert_eq!(uu, identity(3));
        let vv = mat_mul(&s.v_inv, &s.v, 3).unwrap();
        assert_eq!(vv, identity(3));
    }

    #[test]
    fn solve_and_kernel() {
        let a = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(solve(&a, 2, &[4, 9]).unwrap(), Some(vec![2, 3]));
        assert_eq!(solve(&a, 2, &[1, 0]).unwrap(), None);
        let k = kernel(&vec![vec![1, 1, 1]], 3).unwrap();
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!(v.iter().sum::<Int>(), 0);
        }
    }

    #[test]
    fn cokernels() {
        assert_eq!(cokernel_invariants(&[vec![2, 0], vec![0, 4]], 2).unwrap(), Some(vec![2, 4]));
        assert_eq!(cokernel_invariants(&[vec![2, 0], vec![0, 3]], 2).unwrap(), Some(vec![6]));
        assert_eq!(cokernel_invariants(&[vec![1, 0]], 2).unwrap(), None);
    }

    #[test]
    fn decompose_cyclic_products() {
        // ℤ/2 × ℤ/4 encoded as a*4+b
        let op = |x: u32, y: u32| ((x / 4 + y / 4) % 2) * 4 + (x % 4 + y % 4) % 4;
        let d = AbelianCoords::decompose(8, 0, op).unwrap();
        assert_eq!(d.moduli, vec![2, 4]);
        for a in 0..8u32 {
            for b in 0..8u32 {
                let ca = d.coords(a);
                let cb = d.coords(b);
                let sum: Vec<Int> = ca.iter().zip(cb).map(|(x, y)| x + y).collect();
                assert_eq!(d.element(&sum), op(a, b));
            }
        }
        let triv = AbelianCoords::decompose(1, 0, |_, _| 0).unwrap();
        assert_eq!(triv.rank(), 0);
    }
}
