//! Wavefront OBJ (read/write) and ASCII PLY (read) support.

use super::{TriMesh, Vec3};
use crate::error::{Error, Result};
use crate::fmt::sig;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Loads an OBJ or PLY file, chosen by extension, and rejects degenerate faces.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let mesh = match ext.as_str() {
        "ply" => read_ply(reader, path)?,
        _ => read_obj(reader, path)?,
    };
    mesh.check_degenerate_faces()?;
    Ok(mesh)
}

/// Writes an OBJ file (the only supported output format).
pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    write_obj(mesh, path)
}

pub fn write_obj(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    write_obj_to(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

/// OBJ text with 9 significant digits per coordinate and 1-based indices.
pub fn write_obj_to(mesh: &TriMesh, w: &mut impl Write) -> Result<()> {
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", sig(v.x, 9), sig(v.y, 9), sig(v.z, 9))?;
    }
    for f in &mesh.faces {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

pub fn read_obj(reader: impl BufRead, path: &Path) -> Result<TriMesh> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("");
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut xyz = [0.0; 3];
                for c in &mut xyz {
                    let t = tok
                        .next()
                        .ok_or_else(|| err(lineno, "vertex needs 3 coordinates".into()))?;
                    *c = t
                        .parse()
                        .map_err(|_| err(lineno, format!("bad coordinate '{t}'")))?;
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let mut idx = Vec::with_capacity(3);
                for t in tok {
                    let head = t.split('/').next().unwrap_or("");
                    let v: i64 = head
                        .parse()
                        .map_err(|_| err(lineno, format!("bad face index '{t}'")))?;
                    let resolved = if v > 0 {
                        v - 1
                    } else if v < 0 {
                        vertices.len() as i64 + v
                    } else {
                        return Err(err(lineno, "face index 0 is invalid".into()));
                    };
                    if resolved < 0 || resolved as usize >= vertices.len() {
                        return Err(err(lineno, format!("face index {v} out of range")));
                    }
                    idx.push(resolved as usize);
                }
                if idx.len() != 3 {
                    return Err(Error::NonTriangular {
                        face: faces.len(),
                        corners: idx.len(),
                    });
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces)
}

/// ASCII PLY with `vertex` (x, y, z first) and `face` (vertex_indices list) elements.
pub fn read_ply(reader: impl BufRead, path: &Path) -> Result<TriMesh> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = reader.lines().enumerate();
    let mut elements: Vec<(String, usize, usize)> = Vec::new(); // name, count, property count
    let mut header_done = false;
    let mut first = true;
    for (i, line) in lines.by_ref() {
        let line = line?;
        let t: Vec<&str> = line.split_whitespace().collect();
        if first {
            if t.first() != Some(&"ply") {
                return Err(err(i + 1, "missing 'ply' magic".into()));
            }
            first = false;
            continue;
        }
        match t.first().copied() {
            Some("format") => {
                if t.get(1) != Some(&"ascii") {
                    return Err(err(i + 1, "only ASCII PLY is supported".into()));
                }
            }
            Some("element") => {
                let count = t
                    .get(2)
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| err(i + 1, "bad element count".into()))?;
                elements.push((t.get(1).unwrap_or(&"").to_string(), count, 0));
            }
            Some("property") => {
                if let Some(e) = elements.last_mut() {
                    e.2 += 1;
                }
            }
            Some("end_header") => {
                header_done = true;
                break;
            }
            _ => {}
        }
    }
    if !header_done {
        return Err(err(0, "unterminated header".into()));
    }
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (name, count, _) in &elements {
        for _ in 0..*count {
            let (i, line) = lines
                .next()
                .ok_or_else(|| err(0, format!("truncated {name} data")))?;
            let line = line?;
            let vals: Vec<&str> = line.split_whitespace().collect();
            match name.as_str() {
                "vertex" => {
                    let mut xyz = [0.0; 3];
                    for (c, t) in xyz.iter_mut().zip(vals.iter()) {
                        *c = t
                            .parse()
                            .map_err(|_| err(i + 1, format!("bad coordinate '{t}'")))?;
                    }
                    if vals.len() < 3 {
                        return Err(err(i + 1, "vertex needs 3 coordinates".into()));
                    }
                    vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
                }
                "face" => {
                    let n: usize = vals
                        .first()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| err(i + 1, "bad face list".into()))?;
                    if n != 3 {
                        return Err(Error::NonTriangular {
                            face: faces.len(),
                            corners: n,
                        });
                    }
                    let mut f = [0usize; 3];
                    for (k, slot) in f.iter_mut().enumerate() {
                        *slot = vals
                            .get(k + 1)
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| err(i + 1, "bad face index".into()))?;
                    }
                    faces.push(f);
                }
                _ => {}
            }
        }
    }
    TriMesh::new(vertices, faces)
}
