use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{io_error, IoError, Soup};
use crate::geom::Vec3;
use crate::mesh::SolidMesh;

/// Parses `v` and `f` records; polygons are fan-triangulated and texture or
/// normal indices ignored. Errors carry the 1-based line number.
pub fn parse_obj(text: &str) -> Result<Soup, (String, String)> {
    let mut soup = Soup::default();
    for (i, line) in text.lines().enumerate() {
        let err = |m: String| (format!("line {}", i + 1), m);
        let line = line.split('#').next().unwrap_or("");
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut c = [0.0f64; 3];
                for slot in &mut c {
                    let t = tok.next().ok_or_else(|| err("vertex needs three coordinates".into()))?;
                    *slot = t.parse().map_err(|_| err(format!("bad coordinate {t:?}")))?;
                    if !slot.is_finite() {
                        return Err(err(format!("non-finite coordinate {t:?}")));
                    }
                }
                soup.vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in tok {
                    let first = t.split('/').next().unwrap_or("");
                    let raw: i64 = first.parse().map_err(|_| err(format!("bad face index {t:?}")))?;
                    let n = soup.vertices.len() as i64;
                    let k = if raw > 0 { raw - 1 } else { n + raw };
                    if raw == 0 || k < 0 || k >= n {
                        return Err(err(format!("face index {raw} out of range (1..={n})")));
                    }
                    idx.push(k as u32);
                }
                if idx.len() < 3 {
                    return Err(err("face needs at least three vertices".into()));
                }
                for j in 1..idx.len() - 1 {
                    soup.triangles.push([idx[0], idx[j], idx[j + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(soup)
}

/// Rounds to 9 significant digits and prints the shortest form of the result.
fn fmt_coord(x: f64) -> String {
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float");
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn write_object(out: &mut String, mesh: &SolidMesh, base: usize) {
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", fmt_coord(v.x), fmt_coord(v.y), fmt_coord(v.z));
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "f {} {} {}", t[0] as usize + base + 1, t[1] as usize + base + 1, t[2] as usize + base + 1);
    }
}

/// All meshes in one OBJ text, one `o part_<k>` object each.
pub fn obj_string(meshes: &[SolidMesh]) -> String {
    let mut out = String::new();
    let mut base = 0;
    for (k, m) in meshes.iter().enumerate() {
        let _ = writeln!(out, "o part_{k}");
        write_object(&mut out, m, base);
        base += m.vertices().len();
    }
    out
}

pub fn write_obj(path: &Path, meshes: &[SolidMesh]) -> Result<(), IoError> {
    std::fs::write(path, obj_string(meshes)).map_err(|e| io_error(path, e))
}

/// One file per mesh, `<stem>_part<k>.obj` next to `path`. Returns the paths written.
pub fn write_obj_parts(path: &Path, meshes: &[SolidMesh]) -> Result<Vec<PathBuf>, IoError> {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("decomposition");
    let dir = path.parent().unwrap_or(Path::new(""));
    let mut written = Vec::with_capacity(meshes.len());
    for (k, m) in meshes.iter().enumerate() {
        let p = dir.join(format!("{stem}_part{k}.obj"));
        let mut text = String::new();
        write_object(&mut text, m, 0);
        std::fs::write(&p, text).map_err(|e| io_error(&p, e))?;
        written.push(p);
    }
    Ok(written)
}

/// Splits OBJ text into its objects (`o` records), each validated on its own.
pub fn read_obj_objects(text: &str) -> Result<Vec<Soup>, (String, String)> {
    let all = parse_obj(text)?;
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut tri_count = 0;
    for line in text.lines() {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("o") => groups.push((tri_count, tri_count)),
            Some("f") => {
                tri_count += tok.count().saturating_sub(2);
                match groups.last_mut() {
                    Some(g) => g.1 = tri_count,
                    None => groups.push((0, tri_count)),
                }
            }
            _ => {}
        }
    }
    Ok(groups
        .into_iter()
        .filter(|(a, b)| b > a)
        .map(|(a, b)| Soup {
            vertices: all.vertices.clone(),
            triangles: all.triangles[a..b].to_vec(),
        })
        .collect())
}
