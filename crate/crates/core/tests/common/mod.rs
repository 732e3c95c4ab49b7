//! Test-only oracles, independent of the library's channel and entropy code.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qseal::analysis::AnnouncementDistribution;
use qseal::qubit::{BlochVector, DensityMatrix, KrausChannel, Mat2};
use rand::Rng;

pub type Mat4 = [[C; 4]; 4];

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn inner(u: &[C; 4], w: &[C; 4]) -> C {
    u.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

fn normalize(u: [C; 4]) -> [C; 4] {
    let n = inner(&u, &u).re.sqrt();
    u.map(|z| z / n)
}

/// Completes orthonormal columns to a 4×4 unitary by Gram–Schmidt over `seeds`.
fn complete_unitary(mut cols: Vec<[C; 4]>, seeds: &[[C; 4]]) -> Mat4 {
    for s in seeds {
        if cols.len() == 4 {
            break;
        }
        let mut v = *s;
        for q in &cols {
            let proj = inner(q, &v);
            for i in 0..4 {
                v[i] -= proj * q[i];
            }
        }
        let n = inner(&v, &v).re.sqrt();
        if n > 1e-6 {
            cols.push(v.map(|z| z / n));
        }
    }
    assert_eq!(cols.len(), 4, "seeds did not span the complement");
    let mut u = [[C::new(0.0, 0.0); 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..4 {
            u[i][j] = col[i];
        }
    }
    u
}

/// Index of |particle⟩ ⊗ |aux⟩ in the 4-dim product basis.
fn idx(particle: usize, aux: usize) -> usize {
    2 * particle + aux
}

fn kron(p: [C; 2], a: [C; 2]) -> [C; 4] {
    let mut out = [C::new(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            out[idx(i, j)] = p[i] * a[j];
        }
    }
    out
}

/// A unitary coupling for the seal(x) family together with the auxiliary
/// start state |φ⟩: U|0⟩|φ⟩ = |0⟩|F⟩, U|1⟩|φ⟩ = √x|0⟩|G⟩ + √(1−x)|1⟩|F⟩ with
/// ⟨F|G⟩ = 0. `variant` picks one of two unrelated completions of U.
pub struct Coupling {
    pub u: Mat4,
    pub phi: [C; 2],
}

pub fn seal_coupling(x: f64, variant: u8) -> Coupling {
    let (phi, f, g, seeds): ([C; 2], [C; 2], [C; 2], Vec<[C; 4]>) = match variant {
        0 => (
            [c(1.0), c(0.0)],
            [c(1.0), c(0.0)],
            [c(0.0), c(1.0)],
            (0..4).map(|k| {
                let mut e = [c(0.0); 4];
                e[k] = c(1.0);
                e
            }).collect(),
        ),
        _ => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            (
                [c(h), C::new(0.0, h)],
                [c(h), C::new(0.0, h)].map(|z| z * C::new(0.6, 0.8)),
                [C::new(0.0, h), c(h)],
                vec![
                    [C::new(0.3, -0.2), C::new(0.9, 0.1), C::new(-0.4, 0.7), C::new(0.2, 0.2)],
                    [C::new(-0.5, 0.4), C::new(0.1, -0.8), C::new(0.6, 0.3), C::new(0.7, -0.1)],
                    [C::new(0.2, 0.9), C::new(-0.3, 0.3), C::new(0.1, -0.6), C::new(-0.8, 0.4)],
                    [C::new(0.7, 0.0), C::new(0.2, 0.5), C::new(0.4, 0.4), C::new(-0.1, 0.9)],
                ],
            )
        }
    };
    let zero = [c(1.0), c(0.0)];
    let one = [c(0.0), c(1.0)];
    let gamma0 = kron(zero, f);
    let g_part = kron(zero, g);
    let f_part = kron(one, f);
    let mut gamma1 = [c(0.0); 4];
    for i in 0..4 {
        gamma1[i] = g_part[i] * x.sqrt() + f_part[i] * (1.0 - x).sqrt();
    }
    let in0 = kron(zero, phi);
    let in1 = kron(one, phi);
    // U maps the input basis {in0, in1, complement} onto {Γ0, Γ1, complement'}.
    let v_in = complete_unitary(vec![in0, in1], &seeds);
    let v_out = complete_unitary(vec![normalize(gamma0), normalize(gamma1)], &seeds[..].iter().rev().copied().collect::<Vec<_>>());
    // U = V_out V_in†
    let mut u = [[c(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            u[i][j] = (0..4).map(|k| v_out[i][k] * v_in[j][k].conj()).sum();
        }
    }
    Coupling { u, phi }
}

pub fn unitarity_error(u: &Mat4) -> f64 {
    let mut err: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let z: C = (0..4).map(|k| u[k][i].conj() * u[k][j]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            err = err.max((z - want).norm());
        }
    }
    err
}

/// Tr_aux[U (ρ ⊗ |φ⟩⟨φ|) U†].
pub fn coupled_channel_apply(cp: &Coupling, rho: &Mat2) -> Mat2 {
    let mut big = [[c(0.0); 4]; 4];
    for p in 0..2 {
        for q in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    big[idx(p, a)][idx(q, b)] = rho.get(p, q) * cp.phi[a] * cp.phi[b].conj();
                }
            }
        }
    }
    let mut evolved = [[c(0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = c(0.0);
            for k in 0..4 {
                for l in 0..4 {
                    s += cp.u[i][k] * big[k][l] * cp.u[j][l].conj();
                }
            }
            evolved[i][j] = s;
        }
    }
    let mut out = [[c(0.0); 2]; 2];
    for p in 0..2 {
        for q in 0..2 {
            out[p][q] = (0..2).map(|a| evolved[idx(p, a)][idx(q, a)]).sum();
        }
    }
    Mat2::new(out)
}

/// Literal mutual information over all 4^k strings:
/// Σ_c [Pr(c) log 1/Pr(c) + ½ Σ_b Pr(c|b) log Pr(c|b)], in bits.
pub fn brute_force_mi(dist: &AnnouncementDistribution, k: usize) -> f64 {
    fn walk(p0: &[f64; 4], p1: &[f64; 4], depth: usize, a: f64, b: f64, acc: &mut f64) {
        if depth == 0 {
            let pc = 0.5 * (a + b);
            let xlogx = |v: f64| if v > 0.0 { v * v.log2() } else { 0.0 };
            *acc += -xlogx(pc) + 0.5 * (xlogx(a) + xlogx(b));
            return;
        }
        for s in 0..4 {
            walk(p0, p1, depth - 1, a * p0[s], b * p1[s], acc);
        }
    }
    let mut acc = 0.0;
    walk(&dist.given(0), &dist.given(1), k, 1.0, 1.0, &mut acc);
    acc
}

/// Random CPTP channel from a 4×2 isometry (Stinespring), generally non-unital.
pub fn random_channel<R: Rng>(rng: &mut R, label: &str) -> KrausChannel {
    let rand_vec = |rng: &mut R| -> [C; 4] {
        [(); 4].map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    };
    let a = normalize(rand_vec(rng));
    let mut b = rand_vec(rng);
    let proj = inner(&a, &b);
    for i in 0..4 {
        b[i] -= proj * a[i];
    }
    let b = normalize(b);
    // Columns a, b of the isometry V; E_i = rows 2i..2i+2.
    let e = |r: usize| Mat2::new([[a[r], b[r]], [a[r + 1], b[r + 1]]]);
    KrausChannel::new(label, vec![e(0), e(2)]).unwrap()
}

pub fn bloch_state(r: f64, theta: f64, phi: f64) -> DensityMatrix {
    let v = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    let b = BlochVector::new(r, v.map(|c| c / norm)).unwrap();
    qseal::qubit::density_from_bloch(&b)
}

pub fn random_state<R: Rng>(rng: &mut R) -> DensityMatrix {
    let r = rng.gen::<f64>().cbrt();
    let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    bloch_state(r, theta, phi)
}
