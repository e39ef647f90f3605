//! Test support: independent reference implementations (oracles) and random
//! input generators. Nothing here is used by the library itself; each oracle
//! is written the slow, obvious way so it can check the fast one.

use std::collections::BTreeSet;

use evalkit::smiles::{BondOrder, Molecule};
use rand::seq::SliceRandom;
use rand::Rng;

/// Levenshtein distance from the full (m+1)×(n+1) table.
pub fn levenshtein_table(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Random string over a small alphabet so that matches are common.
pub fn random_string<R: Rng>(rng: &mut R, max_len: usize, alphabet: &[char]) -> String {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect()
}

pub type Dense = Vec<Vec<f64>>;

/// Cyclic Jacobi eigensolver for a symmetric matrix. Returns eigenvalues and
/// eigenvectors (as columns of the second result), unsorted.
pub fn jacobi_eigen(a: &Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Dense = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn sqrt_sym(a: &Dense) -> Dense {
    let (w, v) = jacobi_eigen(a);
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| v[i][k] * w[k].max(0.0).sqrt() * v[j][k]).sum())
                .collect()
        })
        .collect()
}

/// Fréchet distance between two Gaussians, computed with the Jacobi solver.
pub fn frechet_oracle(mu1: &[f64], s1: &Dense, mu2: &[f64], s2: &Dense) -> f64 {
    let mean: f64 = mu1.iter().zip(mu2).map(|(a, b)| (a - b) * (a - b)).sum();
    let r = sqrt_sym(s1);
    let m = matmul(&matmul(&r, s2), &r);
    let (w, _) = jacobi_eigen(&m);
    let tr_root: f64 = w.iter().map(|x| x.max(0.0).sqrt()).sum();
    let tr = |s: &Dense| (0..s.len()).map(|i| s[i][i]).sum::<f64>();
    mean + tr(s1) + tr(s2) - 2.0 * tr_root
}

/// Random symmetric positive definite matrix `B Bᵀ + δI`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> Dense {
    let b: Dense = (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = (0..n).map(|k| b[i][k] * b[j][k]).sum();
        }
        s[i][i] += 0.1;
    }
    s
}

/// Path descriptors by brute force: every ordered selection of distinct bonds
/// is tried from each end of its first bond and kept if it forms a trail.
pub fn path_descriptors_oracle(mol: &Molecule, max_bonds: usize) -> BTreeSet<Vec<u8>> {
    let mut out = BTreeSet::new();
    let mut seq = Vec::new();
    fn permute(
        mol: &Molecule,
        k: usize,
        seq: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<u8>>,
    ) {
        if !seq.is_empty() {
            let first = &mol.bonds()[seq[0]];
            for start in [first.from, first.to] {
                if let Some(atoms) = walk(mol, start, seq) {
                    let fwd = describe(mol, &atoms, seq);
                    let rev_bonds: Vec<usize> = seq.iter().rev().copied().collect();
                    let rev_atoms: Vec<usize> = atoms.iter().rev().copied().collect();
                    out.insert(fwd.min(describe(mol, &rev_atoms, &rev_bonds)));
                }
            }
        }
        if seq.len() == k {
            return;
        }
        for b in 0..mol.bonds().len() {
            if !seq.contains(&b) {
                seq.push(b);
                permute(mol, k, seq, out);
                seq.pop();
            }
        }
    }
    fn walk(mol: &Molecule, start: usize, seq: &[usize]) -> Option<Vec<usize>> {
        let mut atoms = vec![start];
        for &b in seq {
            let bond = &mol.bonds()[b];
            let here = *atoms.last().unwrap();
            let next = if bond.from == here {
                bond.to
            } else if bond.to == here {
                bond.from
            } else {
                return None;
            };
            atoms.push(next);
        }
        Some(atoms)
    }
    fn describe(mol: &Molecule, atoms: &[usize], seq: &[usize]) -> Vec<u8> {
        let atom = |i: usize| {
            let a = &mol.atoms()[i];
            [a.element.atomic_number(), u8::from(a.aromatic)]
        };
        let mut v = atom(atoms[0]).to_vec();
        for (k, &b) in seq.iter().enumerate() {
            v.push(mol.bonds()[b].order.code());
            v.extend(atom(atoms[k + 1]));
        }
        v
    }
    permute(mol, max_bonds, &mut seq, &mut out);
    out
}

/// Writes `mol` as SMILES starting from `root`, visiting neighbours in a
/// random order. The result denotes the same graph with a different atom
/// numbering.
pub fn write_smiles<R: Rng>(mol: &Molecule, root: usize, rng: &mut R) -> String {
    let n = mol.atom_count();
    let mut order: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|i| {
            let mut nb = mol.neighbors(i).to_vec();
            nb.shuffle(rng);
            nb
        })
        .collect();
    // Spanning forest by DFS; every other bond becomes a ring closure.
    let mut visited = vec![false; n];
    let mut tree_bond = vec![false; mol.bonds().len()];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    let starts: Vec<usize> = std::iter::once(root).chain(0..n).collect();
    for s in starts {
        if visited[s] {
            continue;
        }
        roots.push(s);
        visited[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(top) = stack.len().checked_sub(1) {
            let (atom, next) = stack[top];
            if next == order[atom].len() {
                stack.pop();
                continue;
            }
            stack[top].1 += 1;
            let (nbr, b) = order[atom][next];
            if !visited[nbr] {
                visited[nbr] = true;
                tree_bond[b] = true;
                children[atom].push((nbr, b));
                stack.push((nbr, 0));
            }
        }
    }
    for list in order.iter_mut() {
        list.retain(|&(_, b)| !tree_bond[b]);
    }
    let mut out = String::new();
    let mut open: Vec<Option<usize>> = vec![None; mol.bonds().len()];
    let mut labels_in_use = BTreeSet::new();
    for (k, &r) in roots.iter().enumerate() {
        if k > 0 {
            out.push('.');
        }
        emit(mol, r, &children, &order, &mut open, &mut labels_in_use, &mut out);
    }
    out
}

fn bond_text(mol: &Molecule, b: usize) -> &'static str {
    let bond = &mol.bonds()[b];
    let both_aromatic = mol.atoms()[bond.from].aromatic && mol.atoms()[bond.to].aromatic;
    match bond.order {
        BondOrder::Single if both_aromatic => "-",
        BondOrder::Single => "",
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Quadruple => "$",
        BondOrder::Aromatic if both_aromatic => "",
        BondOrder::Aromatic => ":",
    }
}

fn atom_text(mol: &Molecule, i: usize) -> String {
    let a = &mol.atoms()[i];
    let symbol = if a.aromatic {
        a.element.symbol().to_lowercase()
    } else {
        a.element.symbol().to_string()
    };
    if !a.in_bracket {
        return symbol;
    }
    let mut s = String::from("[");
    if let Some(iso) = a.isotope {
        s.push_str(&iso.to_string());
    }
    s.push_str(&symbol);
    match a.explicit_h {
        Some(0) | None => {}
        Some(1) => s.push('H'),
        Some(h) => s.push_str(&format!("H{h}")),
    }
    match a.formal_charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => s.push_str(&format!("+{c}")),
        c => s.push_str(&format!("-{}", -c)),
    }
    s.push(']');
    s
}

fn label_text(label: usize) -> String {
    if label < 10 {
        label.to_string()
    } else {
        format!("%{label}")
    }
}

fn emit(
    mol: &Molecule,
    atom: usize,
    children: &[Vec<(usize, usize)>],
    closures: &[Vec<(usize, usize)>],
    open: &mut [Option<usize>],
    in_use: &mut BTreeSet<usize>,
    out: &mut String,
) {
    out.push_str(&atom_text(mol, atom));
    for &(_, b) in &closures[atom] {
        match open[b].take() {
            Some(label) => {
                out.push_str(&label_text(label));
                in_use.remove(&label);
            }
            None => {
                let label = (1..100).find(|l| !in_use.contains(l)).expect("fewer than 100 open rings");
                in_use.insert(label);
                open[b] = Some(label);
                out.push_str(bond_text(mol, b));
                out.push_str(&label_text(label));
            }
        }
    }
    let kids = &children[atom];
    for (k, &(child, b)) in kids.iter().enumerate() {
        let last = k + 1 == kids.len();
        if !last {
            out.push('(');
        }
        out.push_str(bond_text(mol, b));
        emit(mol, child, children, closures, open, in_use, out);
        if !last {
            out.push(')');
        }
    }
}

/// Random grammar-token string and the tokens it was built from. The
/// strings need not be chemically meaningful.
pub fn random_token_string<R: Rng>(rng: &mut R, max_tokens: usize) -> (String, Vec<String>) {
    const BARE: &[&str] = &[
        "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I", "b", "c", "n", "o", "p", "s",
    ];
    const BRACKET: &[&str] = &[
        "[nH]", "[NH4+]", "[O-]", "[13C@@H]", "[Fe+2]", "[C@H]", "[Na+]", "[2H]", "[Se]", "[N+]", "[Pt]",
    ];
    const OTHER: &[&str] = &["-", "=", "#", "$", ":", "/", "\\", "(", ")", ".", "1", "2", "9"];
    let len = rng.random_range(1..=max_tokens);
    let mut tokens = Vec::with_capacity(len);
    for _ in 0..len {
        let t = match rng.random_range(0..10) {
            0..=4 => BARE[rng.random_range(0..BARE.len())].to_string(),
            5 => BRACKET[rng.random_range(0..BRACKET.len())].to_string(),
            6 => format!("%{}", rng.random_range(10..100)),
            _ => OTHER[rng.random_range(0..OTHER.len())].to_string(),
        };
        tokens.push(t);
    }
    (tokens.concat(), tokens)
}

/// Random bond-graph SMILES over the organic subset: a chain with branches
/// and at most one ring open at a time. Always parses.
pub fn random_molecule_smiles<R: Rng>(rng: &mut R, max_atoms: usize) -> String {
    const ATOMS: &[&str] = &["C", "C", "C", "N", "O", "S", "Cl", "F"];
    let n = rng.random_range(1..=max_atoms);
    let mut s = String::new();
    let mut depth = 0;
    // Atom index where the open ring started; branches are not opened while
    // a ring is pending, so the ring path is a plain chain.
    let mut ring_open: Option<usize> = None;
    for i in 0..n {
        if i > 0 && ring_open.is_none() && depth < 2 && rng.random_bool(0.2) {
            s.push('(');
            depth += 1;
        }
        if i > 0 && rng.random_bool(0.1) {
            s.push('=');
        }
        s.push_str(ATOMS[rng.random_range(0..ATOMS.len())]);
        match ring_open {
            None if depth == 0 && i + 2 < n && rng.random_bool(0.15) => {
                s.push('1');
                ring_open = Some(i);
            }
            Some(at) if i >= at + 2 && (i + 1 == n || rng.random_bool(0.3)) => {
                s.push('1');
                ring_open = None;
            }
            _ => {}
        }
        if depth > 0 && rng.random_bool(0.4) {
            s.push(')');
            depth -= 1;
        }
    }
    for _ in 0..depth {
        s.push(')');
    }
    s
}
