//! Closed oriented triangle meshes: ingestion, validation, discrete
//! curvature (angle defects) and generators for the corpus shapes.

use std::collections::HashMap;

use crate::error::{HopfError, Result};
use crate::surfaces::implicit::ImplicitSurface;

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    /// Per-vertex angle defects, filled by `validate`.
    angle_defects: Vec<f64>,
    edge_count: usize,
}

impl TriMesh {
    /// Validate a raw vertex/face soup: the mesh must be closed and
    /// consistently oriented (every undirected edge borne by exactly two
    /// faces traversing it in opposite directions). The global
    /// orientation is normalized to outward normals via the signed
    /// volume; per-face disagreements are hard errors.
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<TriMesh> {
        let mut mesh = TriMesh {
            vertices,
            faces,
            angle_defects: vec![],
            edge_count: 0,
        };
        mesh.check_indices()?;
        mesh.check_manifold()?;
        if mesh.signed_volume() < 0.0 {
            for f in &mut mesh.faces {
                f.swap(1, 2);
            }
        }
        mesh.fill_angle_defects();
        Ok(mesh)
    }

    fn check_indices(&self) -> Result<()> {
        let nv = self.vertices.len();
        for (fi, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&v| v >= nv) {
                return Err(HopfError::Ingestion(format!(
                    "face {fi} references vertex out of range"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(HopfError::Ingestion(format!("face {fi} is degenerate")));
            }
        }
        Ok(())
    }

    fn check_manifold(&mut self) -> Result<()> {
        // For each undirected edge, record directed traversals.
        let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = edges.entry(key).or_insert((0, 0));
                if a < b {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
        }
        for (&(a, b), &(fwd, bwd)) in &edges {
            if fwd + bwd != 2 {
                return Err(HopfError::Ingestion(format!(
                    "edge ({a}, {b}) borne by {} faces, expected 2",
                    fwd + bwd
                )));
            }
            if fwd != 1 || bwd != 1 {
                return Err(HopfError::Ingestion(format!(
                    "edge ({a}, {b}) traversed twice in the same direction: inconsistent orientation"
                )));
            }
        }
        self.edge_count = edges.len();
        Ok(())
    }

    fn fill_angle_defects(&mut self) {
        let mut sums = vec![0.0; self.vertices.len()];
        for f in &self.faces {
            for k in 0..3 {
                let v = f[k];
                let a = self.vertices[f[(k + 1) % 3]];
                let b = self.vertices[f[(k + 2) % 3]];
                let p = self.vertices[v];
                let ea = sub(a, p);
                let eb = sub(b, p);
                let cosang =
                    (dot(ea, eb) / (norm(ea) * norm(eb))).clamp(-1.0, 1.0);
                sums[v] += cosang.acos();
            }
        }
        self.angle_defects = sums
            .iter()
            .map(|s| 2.0 * std::f64::consts::PI - s)
            .collect();
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Combinatorial Euler characteristic V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// 2*pi minus the sum of incident face angles at the vertex.
    pub fn angle_defect(&self, vertex: usize) -> f64 {
        self.angle_defects[vertex]
    }

    /// Sum of all angle defects (equals 2*pi*chi for closed meshes).
    pub fn angle_defect_sum(&self) -> f64 {
        crate::surfaces::quadrature::pairwise_sum(&self.angle_defects)
    }

    /// Signed enclosed volume sum det(a, b, c)/6.
    pub fn signed_volume(&self) -> f64 {
        let mut v = 0.0;
        for f in &self.faces {
            let a = self.vertices[f[0]];
            let b = self.vertices[f[1]];
            let c = self.vertices[f[2]];
            v += dot(a, cross(b, c)) / 6.0;
        }
        v
    }

    pub fn face_area_centroid(&self, fi: usize) -> (f64, [f64; 3]) {
        let f = self.faces[fi];
        let a = self.vertices[f[0]];
        let b = self.vertices[f[1]];
        let c = self.vertices[f[2]];
        let area = 0.5 * norm(cross(sub(b, a), sub(c, a)));
        let centroid = [
            (a[0] + b[0] + c[0]) / 3.0,
            (a[1] + b[1] + c[1]) / 3.0,
            (a[2] + b[2] + c[2]) / 3.0,
        ];
        (area, centroid)
    }

    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        s.push_str(&format!(
            "{} {} {}\n",
            self.vertex_count(),
            self.face_count(),
            self.edge_count()
        ));
        for v in &self.vertices {
            s.push_str(&format!("{:.17} {:.17} {:.17}\n", v[0], v[1], v[2]));
        }
        for f in &self.faces {
            s.push_str(&format!("3 {} {} {}\n", f[0], f[1], f[2]));
        }
        s
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Parse an OFF or OBJ payload (triangles only) and validate it.
pub fn ingest_mesh(payload: &str) -> Result<TriMesh> {
    let trimmed = payload.trim_start();
    if trimmed.starts_with("OFF") {
        ingest_off(payload)
    } else {
        ingest_obj(payload)
    }
}

fn ingest_off(payload: &str) -> Result<TriMesh> {
    let mut lines = payload
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| HopfError::Ingestion("empty OFF".into()))?;
    if header != "OFF" {
        return Err(HopfError::Ingestion("missing OFF header".into()));
    }
    let counts = lines
        .next()
        .ok_or_else(|| HopfError::Ingestion("missing OFF counts".into()))?;
    let mut it = counts.split_whitespace();
    let nv: usize = parse(it.next(), "vertex count")?;
    let nf: usize = parse(it.next(), "face count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| HopfError::Ingestion("truncated OFF vertices".into()))?;
        let mut it = line.split_whitespace();
        vertices.push([
            parse(it.next(), "x")?,
            parse(it.next(), "y")?,
            parse(it.next(), "z")?,
        ]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines
            .next()
            .ok_or_else(|| HopfError::Ingestion("truncated OFF faces".into()))?;
        let mut it = line.split_whitespace();
        let k: usize = parse(it.next(), "face arity")?;
        if k != 3 {
            return Err(HopfError::Ingestion(format!(
                "only triangles supported, got {k}-gon"
            )));
        }
        faces.push([
            parse(it.next(), "i")?,
            parse(it.next(), "j")?,
            parse(it.next(), "k")?,
        ]);
    }
    TriMesh::new(vertices, faces)
}

fn ingest_obj(payload: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in payload.lines() {
        let line = line.trim();
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                vertices.push([
                    parse(it.next(), "x")?,
                    parse(it.next(), "y")?,
                    parse(it.next(), "z")?,
                ]);
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or(tok);
                        first.parse::<usize>().map_err(|_| {
                            HopfError::Ingestion(format!("bad face index {tok:?}"))
                        })
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(HopfError::Ingestion(format!(
                        "only triangles supported, got {}-gon",
                        idx.len()
                    )));
                }
                if idx.iter().any(|&i| i == 0) {
                    return Err(HopfError::Ingestion("OBJ indices are 1-based".into()));
                }
                faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| HopfError::Ingestion(format!("missing {what}")))?
        .parse()
        .map_err(|_| HopfError::Ingestion(format!("malformed {what}")))
}

// ---------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------

/// Regular tetrahedron inscribed in the unit sphere.
pub fn tetrahedron() -> TriMesh {
    let s = 1.0 / (3.0f64).sqrt();
    let vertices = vec![
        [s, s, s],
        [s, -s, -s],
        [-s, s, -s],
        [-s, -s, s],
    ];
    let faces = vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
    TriMesh::new(vertices, faces).expect("valid tetrahedron")
}

/// Icosahedron subdivided `subdiv` times, vertices projected to the
/// radius-`r` sphere. subdiv = 2 gives V=162, E=480, F=320.
pub fn icosphere(subdiv: usize, r: f64) -> TriMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdiv {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoints.entry(key).or_insert_with(|| {
                    let va = vertices[a];
                    let vb = vertices[b];
                    vertices.push([
                        0.5 * (va[0] + vb[0]),
                        0.5 * (va[1] + vb[1]),
                        0.5 * (va[2] + vb[2]),
                    ]);
                    vertices.len() - 1
                });
            }
            new_faces.push([f[0], mid[0], mid[2]]);
            new_faces.push([f[1], mid[1], mid[0]]);
            new_faces.push([f[2], mid[2], mid[1]]);
            new_faces.push([mid[0], mid[1], mid[2]]);
        }
        faces = new_faces;
    }
    for v in &mut vertices {
        let n = norm(*v);
        *v = [r * v[0] / n, r * v[1] / n, r * v[2] / n];
    }
    TriMesh::new(vertices, faces).expect("valid icosphere")
}

/// Structured torus mesh: nu x nv grid of quads split into triangles.
/// A 32x32 grid gives V=1024, E=3072, F=2048.
pub fn torus_grid(nu: usize, nv: usize, big_r: f64, small_r: f64) -> TriMesh {
    let tau = 2.0 * std::f64::consts::PI;
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let phi = tau * i as f64 / nu as f64;
            let theta = tau * j as f64 / nv as f64;
            let rho = big_r + small_r * theta.cos();
            vertices.push([rho * phi.cos(), rho * phi.sin(), small_r * theta.sin()]);
        }
    }
    let at = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let a = at(i, j);
            let b = at(i + 1, j);
            let c = at(i + 1, j + 1);
            let d = at(i, j + 1);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh::new(vertices, faces).expect("valid torus grid")
}

/// Extract the level set {F = 0} of an implicit surface as a closed
/// triangle mesh by marching tetrahedra over a regular grid (each cube
/// split into six tetrahedra around its main diagonal, so shared cube
/// faces are split consistently).
pub fn marching_tetrahedra(surface: &ImplicitSurface, resolution: [usize; 3]) -> Result<TriMesh> {
    let bbox = &surface.bbox;
    if bbox.len() != 3 {
        return Err(HopfError::Input("marching tetrahedra needs R^3".into()));
    }
    let [nx, ny, nz] = resolution;
    let step: Vec<f64> = (0..3)
        .map(|i| (bbox[i].1 - bbox[i].0) / resolution[i] as f64)
        .collect();
    let coord = |i: usize, j: usize, k: usize| -> [f64; 3] {
        [
            bbox[0].0 + i as f64 * step[0],
            bbox[1].0 + j as f64 * step[1],
            bbox[2].0 + k as f64 * step[2],
        ]
    };
    let gid = |i: usize, j: usize, k: usize| -> usize {
        (i * (ny + 1) + j) * (nz + 1) + k
    };
    // Sample grid values; nudge exact zeros off the level set.
    let mut values = vec![0.0f64; (nx + 1) * (ny + 1) * (nz + 1)];
    for i in 0..=nx {
        for j in 0..=ny {
            for k in 0..=nz {
                let mut v = surface.eval(&coord(i, j, k));
                if v.abs() < 1e-12 {
                    v = 1e-12;
                }
                values[gid(i, j, k)] = v;
            }
        }
    }

    // Six tetrahedra per cube, all containing the 0-7 diagonal. Corner
    // bit b = dx + 2 dy + 4 dz.
    const TETS: [[usize; 4]; 6] = [
        [0, 1, 5, 7],
        [0, 5, 4, 7],
        [0, 4, 6, 7],
        [0, 6, 2, 7],
        [0, 2, 3, 7],
        [0, 3, 1, 7],
    ];

    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut edge_vertex: HashMap<(usize, usize), usize> = HashMap::new();
    let mut faces: Vec<[usize; 3]> = Vec::new();

    let mut emit_edge = |ga: usize,
                         gb: usize,
                         pa: [f64; 3],
                         pb: [f64; 3],
                         va: f64,
                         vb: f64,
                         vertices: &mut Vec<[f64; 3]>|
     -> usize {
        let key = (ga.min(gb), ga.max(gb));
        *edge_vertex.entry(key).or_insert_with(|| {
            let s = va / (va - vb);
            vertices.push([
                pa[0] + s * (pb[0] - pa[0]),
                pa[1] + s * (pb[1] - pa[1]),
                pa[2] + s * (pb[2] - pa[2]),
            ]);
            vertices.len() - 1
        })
    };

    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let corners: Vec<(usize, [f64; 3], f64)> = (0..8)
                    .map(|b| {
                        let (di, dj, dk) = (b & 1, (b >> 1) & 1, (b >> 2) & 1);
                        let g = gid(i + di, j + dj, k + dk);
                        (g, coord(i + di, j + dj, k + dk), values[g])
                    })
                    .collect();
                for tet in &TETS {
                    // Arrange as positively oriented tuple.
                    let mut t: Vec<usize> = tet.to_vec();
                    let p: Vec<[f64; 3]> = t.iter().map(|&c| corners[c].1).collect();
                    let e1 = sub(p[1], p[0]);
                    let e2 = sub(p[2], p[0]);
                    let e3 = sub(p[3], p[0]);
                    if dot(e1, cross(e2, e3)) < 0.0 {
                        t.swap(2, 3);
                    }
                    let inside: Vec<usize> =
                        t.iter().copied().filter(|&c| corners[c].2 < 0.0).collect();
                    let outside: Vec<usize> =
                        t.iter().copied().filter(|&c| corners[c].2 >= 0.0).collect();
                    let parity_of = |arr: &[usize; 4]| -> i32 {
                        // parity of arr as permutation of t
                        let pos: Vec<u8> = arr
                            .iter()
                            .map(|x| t.iter().position(|y| y == x).unwrap() as u8)
                            .collect();
                        crate::forms::permutation_parity(&pos)
                    };
                    let mut tri_edges: Vec<[(usize, usize); 3]> = Vec::new();
                    match inside.len() {
                        0 | 4 => {}
                        1 => {
                            let a = inside[0];
                            let mut arr = [a, outside[0], outside[1], outside[2]];
                            if parity_of(&arr) < 0 {
                                arr.swap(1, 2);
                            }
                            // normal away from the inside vertex
                            tri_edges.push([(arr[0], arr[1]), (arr[0], arr[2]), (arr[0], arr[3])]);
                        }
                        3 => {
                            let q = outside[0];
                            let mut arr = [q, inside[0], inside[1], inside[2]];
                            if parity_of(&arr) < 0 {
                                arr.swap(1, 2);
                            }
                            // normal toward the outside vertex: reversed winding
                            tri_edges.push([(arr[0], arr[1]), (arr[0], arr[3]), (arr[0], arr[2])]);
                        }
                        2 => {
                            let mut arr = [inside[0], inside[1], outside[0], outside[1]];
                            if parity_of(&arr) < 0 {
                                arr.swap(2, 3);
                            }
                            let (a, b, c, d) = (arr[0], arr[1], arr[2], arr[3]);
                            tri_edges.push([(a, c), (a, d), (b, d)]);
                            tri_edges.push([(a, c), (b, d), (b, c)]);
                        }
                        _ => unreachable!(),
                    }
                    for te in tri_edges {
                        let mut tri = [0usize; 3];
                        for (m, &(ca, cb)) in te.iter().enumerate() {
                            let (ga, pa, va) = corners[ca];
                            let (gb, pb, vb) = corners[cb];
                            tri[m] = emit_edge(ga, gb, pa, pb, va, vb, &mut vertices);
                        }
                        if tri[0] != tri[1] && tri[1] != tri[2] && tri[0] != tri[2] {
                            faces.push(tri);
                        }
                    }
                }
            }
        }
    }
    TriMesh::new(vertices, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn tetrahedron_counts_and_defects() {
        let m = tetrahedron();
        assert_eq!(m.vertex_count(), 4);
        assert_eq!(m.edge_count(), 6);
        assert_eq!(m.face_count(), 4);
        assert_eq!(m.euler_characteristic(), 2);
        // each vertex sees three equilateral-triangle angles
        assert_relative_eq!(m.angle_defect(0), 2.0 * PI - 3.0 * PI / 3.0, epsilon = 1e-12);
        assert!(m.signed_volume() > 0.0);
    }

    #[test]
    fn icosphere_counts() {
        let m = icosphere(2, 1.0);
        assert_eq!(m.vertex_count(), 162);
        assert_eq!(m.edge_count(), 480);
        assert_eq!(m.face_count(), 320);
        assert_eq!(m.euler_characteristic(), 2);
        assert_relative_eq!(m.angle_defect_sum(), 4.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn torus_grid_counts() {
        let m = torus_grid(32, 32, 2.0, 1.0);
        assert_eq!(m.vertex_count(), 1024);
        assert_eq!(m.edge_count(), 3072);
        assert_eq!(m.face_count(), 2048);
        assert_eq!(m.euler_characteristic(), 0);
        assert_relative_eq!(m.angle_defect_sum(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn off_round_trip() {
        let m = tetrahedron();
        let text = m.to_off();
        let m2 = ingest_mesh(&text).unwrap();
        assert_eq!(m2.vertex_count(), 4);
        assert_eq!(m2.euler_characteristic(), 2);
    }

    #[test]
    fn obj_ingestion() {
        let m = tetrahedron();
        let mut obj = String::new();
        for v in &m.vertices {
            obj.push_str(&format!("v {} {} {}\n", v[0], v[1], v[2]));
        }
        for f in &m.faces {
            obj.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
        }
        let m2 = ingest_mesh(&obj).unwrap();
        assert_eq!(m2.euler_characteristic(), 2);
    }

    #[test]
    fn open_mesh_rejected() {
        let m = tetrahedron();
        let faces = m.faces[..3].to_vec();
        let err = TriMesh::new(m.vertices.clone(), faces).unwrap_err();
        assert!(err.to_string().contains("edge"));
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let m = tetrahedron();
        let mut faces = m.faces.clone();
        faces[0].swap(0, 1);
        assert!(TriMesh::new(m.vertices.clone(), faces).is_err());
    }

    #[test]
    fn global_flip_normalizes_orientation() {
        let m = tetrahedron();
        let flipped: Vec<[usize; 3]> = m.faces.iter().map(|f| [f[0], f[2], f[1]]).collect();
        let m2 = TriMesh::new(m.vertices.clone(), flipped).unwrap();
        assert!(m2.signed_volume() > 0.0);
    }
}
