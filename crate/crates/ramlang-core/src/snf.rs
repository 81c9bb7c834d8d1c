//! Smith normal form over the integers, with unimodular transforms.
//!
//! A relation matrix `R` (rows are relations on `Z^n`) is brought to
//! `U R V = D`. The quotient `Z^n / rowspace(R)` is then `(+) Z/d_i` in the
//! coordinates `x V`.

use alloc::vec;
use alloc::vec::Vec;
use num_integer::Integer;

type Mat = Vec<Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    /// Diagonal of `D`, length `n`; zero entries are free summands.
    pub diag: Vec<i64>,
    /// Row transform, `m x m`.
    pub u: Mat,
    /// Column transform, `n x n`.
    pub v: Mat,
    /// Inverse of `v`.
    pub v_inv: Mat,
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn add_row(m: &mut Mat, dst: usize, src: usize, k: i64) {
    if k == 0 {
        return;
    }
    for c in 0..m[dst].len() {
        m[dst][c] = m[dst][c].checked_add(k.checked_mul(m[src][c]).expect("overflow")).expect("overflow");
    }
}

fn add_col(m: &mut Mat, dst: usize, src: usize, k: i64) {
    if k == 0 {
        return;
    }
    for row in m.iter_mut() {
        row[dst] = row[dst].checked_add(k.checked_mul(row[src]).expect("overflow")).expect("overflow");
    }
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn neg_row(m: &mut Mat, r: usize) {
    for x in &mut m[r] {
        *x = -*x;
    }
}

struct Work {
    a: Mat,
    u: Mat,
    v: Mat,
    v_inv: Mat,
}

impl Work {
    fn row_add(&mut self, dst: usize, src: usize, k: i64) {
        add_row(&mut self.a, dst, src, k);
        add_row(&mut self.u, dst, src, k);
    }

    fn row_swap(&mut self, x: usize, y: usize) {
        self.a.swap(x, y);
        self.u.swap(x, y);
    }

    fn row_neg(&mut self, r: usize) {
        neg_row(&mut self.a, r);
        neg_row(&mut self.u, r);
    }

    // column dst += k * column src; the inverse gets row src -= k * row dst
    fn col_add(&mut self, dst: usize, src: usize, k: i64) {
        add_col(&mut self.a, dst, src, k);
        add_col(&mut self.v, dst, src, k);
        add_row(&mut self.v_inv, src, dst, -k);
    }

    fn col_swap(&mut self, x: usize, y: usize) {
        swap_cols(&mut self.a, x, y);
        swap_cols(&mut self.v, x, y);
        self.v_inv.swap(x, y);
    }
}

/// Smith normal form of an `m x n` relation matrix.
#[must_use]
pub fn smith(rel: &[Vec<i64>], n: usize) -> Smith {
    let m = rel.len();
    for r in rel {
        assert_eq!(r.len(), n, "ragged relation matrix");
    }
    let mut w = Work { a: rel.to_vec(), u: identity(m), v: identity(n), v_inv: identity(n) };
    let mut t = 0;
    while t < m.min(n) {
        let Some((pr, pc)) = min_entry(&w.a, t) else { break };
        w.row_swap(t, pr);
        w.col_swap(t, pc);
        loop {
            let mut done = true;
            for r in t + 1..m {
                let q = Integer::div_floor(&w.a[r][t], &w.a[t][t]);
                w.row_add(r, t, -q);
                if w.a[r][t] != 0 {
                    done = false;
                }
            }
            for c in t + 1..n {
                let q = Integer::div_floor(&w.a[t][c], &w.a[t][t]);
                w.col_add(c, t, -q);
                if w.a[t][c] != 0 {
                    done = false;
                }
            }
            if done {
                // divisibility of the remaining block
                let piv = w.a[t][t];
                let bad = (t + 1..m).find(|&r| (t + 1..n).any(|c| w.a[r][c] % piv != 0));
                match bad {
                    Some(r) => {
                        w.row_add(t, r, 1);
                    }
                    None => break,
                }
            }
            let (pr, pc) = min_entry(&w.a, t).expect("pivot block is nonzero");
            w.row_swap(t, pr);
            w.col_swap(t, pc);
        }
        if w.a[t][t] < 0 {
            w.row_neg(t);
        }
        t += 1;
    }
    let diag = (0..n).map(|i| if i < m { w.a[i][i] } else { 0 }).collect();
    Smith { diag, u: w.u, v: w.v, v_inv: w.v_inv }
}

fn min_entry(a: &Mat, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (r, row) in a.iter().enumerate().skip(t) {
        for (c, &x) in row.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(br, bc)| x.abs() < a[br][bc].abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}

impl Smith {
    /// Invariant factors `d_i != 1`, with `0` for free summands.
    #[must_use]
    pub fn invariants(&self) -> Vec<i64> {
        self.diag.iter().copied().filter(|&d| d != 1).collect()
    }

    /// Positions in `diag` carrying a nontrivial summand.
    fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.diag.len()).filter(|&i| self.diag[i] != 1)
    }

    /// Image of `x` in `(+) Z/d_i`, one coordinate per invariant factor.
    #[must_use]
    pub fn project(&self, x: &[i64]) -> Vec<i64> {
        let y = row_times(x, &self.v);
        self.active()
            .map(|i| if self.diag[i] == 0 { y[i] } else { y[i].mod_floor(&self.diag[i]) })
            .collect()
    }

    /// A preimage in `Z^n` of quotient coordinates.
    #[must_use]
    pub fn lift(&self, q: &[i64]) -> Vec<i64> {
        let mut y = vec![0; self.diag.len()];
        for (k, i) in self.active().enumerate() {
            y[i] = q[k];
        }
        row_times(&y, &self.v_inv)
    }

    /// Order of the quotient, `None` when it is infinite.
    #[must_use]
    pub fn order(&self) -> Option<u64> {
        self.invariants().iter().try_fold(1u64, |acc, &d| if d == 0 { None } else { Some(acc * d as u64) })
    }
}

/// `x * M` for a row vector `x`.
#[must_use]
pub fn row_times(x: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    let n = m.first().map_or(0, Vec::len);
    let mut out = vec![0i64; n];
    for (xi, row) in x.iter().zip(m) {
        if *xi == 0 {
            continue;
        }
        for (o, &r) in out.iter_mut().zip(row) {
            *o += xi * r;
        }
    }
    out
}

/// Invariant factors of the subgroup of `(+) Z/d_i` generated by `gens`.
#[must_use]
pub fn subgroup_invariants(d: &[i64], gens: &[Vec<i64>]) -> Vec<i64> {
    let k = gens.len();
    let r = d.len();
    // kernel of Z^k -> (+) Z/d_i: left kernel of [gens; diag(d)], first k coordinates
    let mut m: Mat = gens.to_vec();
    for (i, &di) in d.iter().enumerate() {
        let mut row = vec![0; r];
        row[i] = di;
        m.push(row);
    }
    let s = smith(&m, r);
    let rank = s.diag.iter().filter(|&&x| x != 0).count();
    let kernel: Mat = s.u[rank..].iter().map(|row| row[..k].to_vec()).collect();
    if k == 0 {
        return Vec::new();
    }
    smith(&kernel, k).invariants()
}
