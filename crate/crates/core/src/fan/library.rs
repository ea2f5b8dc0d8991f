//! Standard fans used by tests, examples and the command-line corpus.

use crate::fan::{Fan, FanData};

fn build(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Fan {
    Fan::from_data(&FanData {
        rank,
        rays,
        cones,
        complete: None,
    })
    .expect("library fan is valid")
}

/// Fan of `P^n`: rays `e_1, …, e_n, −Σe_i`, cones all proper subsets.
pub fn projective_space(n: usize) -> Fan {
    let mut rays: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    rays.push(vec![-1; n]);
    let cones = (0..=n)
        .map(|skip| (0..=n).filter(|&i| i != skip).collect())
        .collect();
    build(n, rays, cones)
}

pub fn projective_line() -> Fan {
    projective_space(1)
}

pub fn projective_plane() -> Fan {
    projective_space(2)
}

/// Product fan: rays `(u, 0)` and `(0, w)`, cones `σ × τ`.
pub fn product(a: &Fan, b: &Fan) -> Fan {
    let (na, nb) = (a.rank(), b.rank());
    let mut rays: Vec<Vec<i64>> = a
        .rays()
        .iter()
        .map(|u| {
            let mut v = u.coords().to_vec();
            v.extend(std::iter::repeat_n(0, nb));
            v
        })
        .collect();
    let offset = rays.len();
    rays.extend(b.rays().iter().map(|w| {
        let mut v = vec![0; na];
        v.extend_from_slice(w.coords());
        v
    }));
    let mut cones = Vec::new();
    for s in a.max_cones() {
        for t in b.max_cones() {
            let mut c: Vec<usize> = s.rays().to_vec();
            c.extend(t.rays().iter().map(|r| r + offset));
            cones.push(c);
        }
    }
    build(na + nb, rays, cones)
}

pub fn p1_x_p1() -> Fan {
    product(&projective_line(), &projective_line())
}

/// Hirzebruch surface `F_a`: rays `(1,0), (0,1), (−1,a), (0,−1)`.
pub fn hirzebruch(a: i64) -> Fan {
    build(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
}

/// `P²` blown up at the fixed point of the cone `{(1,0),(0,1)}`.
pub fn blown_up_plane() -> Fan {
    build(
        2,
        vec![vec![1, 0], vec![1, 1], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
}

/// Weighted projective plane `P(1,1,2)`, singular at one fixed point.
pub fn weighted_112() -> Fan {
    build(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, -2]],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
    )
}

/// The affine plane: a single smooth two-dimensional cone.
pub fn quadrant() -> Fan {
    build(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]])
}

/// `P³` blown up at the fixed point of the cone `{e1,e2,e3}`.
pub fn blown_up_p3() -> Fan {
    build(
        3,
        vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![-1, -1, -1],
            vec![1, 1, 1],
        ],
        vec![
            vec![4, 1, 2],
            vec![0, 4, 2],
            vec![0, 1, 4],
            vec![1, 2, 3],
            vec![0, 2, 3],
            vec![0, 1, 3],
        ],
    )
}

/// The smooth complete fans exercised by the corpus-wide checks.
pub fn smooth_complete_corpus() -> Vec<(&'static str, Fan)> {
    vec![
        ("P1", projective_line()),
        ("P2", projective_plane()),
        ("P1xP1", p1_x_p1()),
        ("Bl_pt P2", blown_up_plane()),
        ("F2", hirzebruch(2)),
        ("F3", hirzebruch(3)),
        ("P3", projective_space(3)),
        ("P2xP1", product(&projective_plane(), &projective_line())),
        ("P1xP1xP1", product(&p1_x_p1(), &projective_line())),
        ("Bl_pt P3", blown_up_p3()),
    ]
}
