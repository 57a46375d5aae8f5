//! PLY import/export for meshes and oriented point clouds.
//!
//! The writer emits either ASCII or binary little-endian files with
//! `x,y,z,nx,ny,nz` vertex properties and a `vertex_indices` face list.
//! The reader accepts both encodings, tolerates extra properties, and
//! triangulates polygon fans.

use crate::error::CoreError;
use crate::mesh::TriangleMesh;
use crate::real::Real;
use crate::vec::Vec3;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlyFormat {
    Ascii,
    BinaryLittleEndian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ScalarType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl ScalarType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn read_binary<R: Read>(self, r: &mut R) -> std::io::Result<f64> {
        Ok(match self {
            Self::I8 => r.read_i8()? as f64,
            Self::U8 => r.read_u8()? as f64,
            Self::I16 => r.read_i16::<LittleEndian>()? as f64,
            Self::U16 => r.read_u16::<LittleEndian>()? as f64,
            Self::I32 => r.read_i32::<LittleEndian>()? as f64,
            Self::U32 => r.read_u32::<LittleEndian>()? as f64,
            Self::F32 => r.read_f32::<LittleEndian>()? as f64,
            Self::F64 => r.read_f64::<LittleEndian>()?,
        })
    }
}

#[derive(Debug, Clone)]
enum Property {
    Scalar { name: String, ty: ScalarType },
    List { name: String, count: ScalarType, item: ScalarType },
}


#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
    body_offset: usize,
}

fn header_err(line: usize, text: &str, reason: &str) -> CoreError {
    CoreError::PlyHeader {
        line,
        text: text.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header, CoreError> {
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut pos = 0usize;
    let mut line_no = 0usize;

    loop {
        let rest = &bytes[pos..];
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| header_err(line_no + 1, "", "missing end_header"))?;
        let raw = &rest[..nl];
        pos += nl + 1;
        line_no += 1;
        let line = String::from_utf8_lossy(raw).trim_end_matches('\r').trim().to_string();
        let tokens: Vec<&str> = line.split_whitespace().collect();

        if line_no == 1 {
            if line != "ply" {
                return Err(header_err(line_no, &line, "file does not start with 'ply'"));
            }
            continue;
        }
        match tokens.first().copied() {
            Some("format") => {
                format = Some(match tokens.get(1).copied() {
                    Some("ascii") => PlyFormat::Ascii,
                    Some("binary_little_endian") => PlyFormat::BinaryLittleEndian,
                    Some(other) => {
                        return Err(header_err(
                            line_no,
                            &line,
                            &format!("unsupported format {other:?}"),
                        ))
                    }
                    None => return Err(header_err(line_no, &line, "format missing encoding")),
                });
            }
            Some("comment") | Some("obj_info") => {}
            Some("element") => {
                let name = tokens
                    .get(1)
                    .ok_or_else(|| header_err(line_no, &line, "element missing name"))?;
                let count: usize = tokens
                    .get(2)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| header_err(line_no, &line, "element missing count"))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            Some("property") => {
                let elem = elements
                    .last_mut()
                    .ok_or_else(|| header_err(line_no, &line, "property before any element"))?;
                if tokens.get(1).copied() == Some("list") {
                    let count = tokens
                        .get(2)
                        .and_then(|s| ScalarType::parse(s))
                        .ok_or_else(|| header_err(line_no, &line, "bad list count type"))?;
                    let item = tokens
                        .get(3)
                        .and_then(|s| ScalarType::parse(s))
                        .ok_or_else(|| header_err(line_no, &line, "bad list item type"))?;
                    let name = tokens
                        .get(4)
                        .ok_or_else(|| header_err(line_no, &line, "list property missing name"))?;
                    elem.properties.push(Property::List {
                        name: name.to_string(),
                        count,
                        item,
                    });
                } else {
                    let ty = tokens
                        .get(1)
                        .and_then(|s| ScalarType::parse(s))
                        .ok_or_else(|| header_err(line_no, &line, "unknown property type"))?;
                    let name = tokens
                        .get(2)
                        .ok_or_else(|| header_err(line_no, &line, "property missing name"))?;
                    elem.properties.push(Property::Scalar {
                        name: name.to_string(),
                        ty,
                    });
                }
            }
            Some("end_header") => {
                let format =
                    format.ok_or_else(|| header_err(line_no, &line, "no format line seen"))?;
                return Ok(Header {
                    format,
                    elements,
                    body_offset: pos,
                });
            }
            Some(other) => {
                return Err(header_err(
                    line_no,
                    &line,
                    &format!("unknown header keyword {other:?}"),
                ))
            }
            None => {}
        }
    }
}

/// Raw parsed contents of one PLY file.
pub struct PlyContents<T> {
    pub vertices: Vec<Vec3<T>>,
    pub normals: Option<Vec<Vec3<T>>>,
    pub faces: Vec<Vec<usize>>,
}

fn parse_body<T: Real>(bytes: &[u8], header: &Header, path: &Path) -> Result<PlyContents<T>, CoreError> {
    let mut vertices: Vec<Vec3<T>> = Vec::new();
    let mut normals: Vec<Vec3<T>> = Vec::new();
    let mut has_normals = false;
    let mut faces: Vec<Vec<usize>> = Vec::new();

    let body = &bytes[header.body_offset..];
    match header.format {
        PlyFormat::Ascii => {
            let text = String::from_utf8_lossy(body);
            let mut lines = text.lines().filter(|l| !l.trim().is_empty());
            for elem in &header.elements {
                for _ in 0..elem.count {
                    let line = lines.next().ok_or_else(|| {
                        CoreError::PlyBody(format!("unexpected end of data in element {}", elem.name))
                    })?;
                    let mut toks = line.split_whitespace();
                    let mut scalars: Vec<(String, f64)> = Vec::new();
                    let mut list: Vec<usize> = Vec::new();
                    let mut saw_list = false;
                    for prop in &elem.properties {
                        match prop {
                            Property::Scalar { name, .. } => {
                                let v: f64 = toks
                                    .next()
                                    .and_then(|t| t.parse().ok())
                                    .ok_or_else(|| {
                                        CoreError::PlyBody(format!(
                                            "bad scalar for property {name} in element {}",
                                            elem.name
                                        ))
                                    })?;
                                scalars.push((name.clone(), v));
                            }
                            Property::List { name, .. } => {
                                let n: usize = toks
                                    .next()
                                    .and_then(|t| t.parse().ok())
                                    .ok_or_else(|| {
                                        CoreError::PlyBody(format!("bad list count for {name}"))
                                    })?;
                                for _ in 0..n {
                                    let v: i64 = toks
                                        .next()
                                        .and_then(|t| t.parse().ok())
                                        .ok_or_else(|| {
                                            CoreError::PlyBody(format!("bad list item for {name}"))
                                        })?;
                                    if v < 0 {
                                        return Err(CoreError::PlyBody(format!(
                                            "negative index in {name}"
                                        )));
                                    }
                                    list.push(v as usize);
                                }
                                saw_list = name == "vertex_indices" || name == "vertex_index";
                            }
                        }
                    }
                    ingest_element(
                        elem,
                        &scalars,
                        saw_list.then_some(&list[..]),
                        &mut vertices,
                        &mut normals,
                        &mut has_normals,
                        &mut faces,
                    );
                }
            }
        }
        PlyFormat::BinaryLittleEndian => {
            let mut r = std::io::Cursor::new(body);
            for elem in &header.elements {
                for _ in 0..elem.count {
                    let mut scalars: Vec<(String, f64)> = Vec::new();
                    let mut list: Vec<usize> = Vec::new();
                    let mut saw_list = false;
                    for prop in &elem.properties {
                        match prop {
                            Property::Scalar { name, ty } => {
                                let v = ty.read_binary(&mut r).map_err(|_| {
                                    CoreError::UnexpectedEof { path: path.into() }
                                })?;
                                scalars.push((name.clone(), v));
                            }
                            Property::List { name, count, item } => {
                                let n = count.read_binary(&mut r).map_err(|_| {
                                    CoreError::UnexpectedEof { path: path.into() }
                                })? as usize;
                                for _ in 0..n {
                                    let v = item.read_binary(&mut r).map_err(|_| {
                                        CoreError::UnexpectedEof { path: path.into() }
                                    })?;
                                    if v < 0.0 {
                                        return Err(CoreError::PlyBody(format!(
                                            "negative index in {name}"
                                        )));
                                    }
                                    list.push(v as usize);
                                }
                                saw_list = name == "vertex_indices" || name == "vertex_index";
                            }
                        }
                    }
                    ingest_element(
                        elem,
                        &scalars,
                        saw_list.then_some(&list[..]),
                        &mut vertices,
                        &mut normals,
                        &mut has_normals,
                        &mut faces,
                    );
                }
            }
        }
    }

    Ok(PlyContents {
        vertices,
        normals: has_normals.then_some(normals),
        faces,
    })
}

fn ingest_element<T: Real>(
    elem: &Element,
    scalars: &[(String, f64)],
    list: Option<&[usize]>,
    vertices: &mut Vec<Vec3<T>>,
    normals: &mut Vec<Vec3<T>>,
    has_normals: &mut bool,
    faces: &mut Vec<Vec<usize>>,
) {
    let get = |name: &str| scalars.iter().find(|(n, _)| n == name).map(|(_, v)| *v);
    if elem.name == "vertex" {
        let x = get("x").unwrap_or(0.0);
        let y = get("y").unwrap_or(0.0);
        let z = get("z").unwrap_or(0.0);
        vertices.push(Vec3::from_f64(x, y, z));
        if let (Some(nx), Some(ny), Some(nz)) = (get("nx"), get("ny"), get("nz")) {
            *has_normals = true;
            normals.push(Vec3::from_f64(nx, ny, nz));
        } else {
            normals.push(Vec3::zero());
        }
    } else if elem.name == "face" {
        if let Some(idx) = list {
            faces.push(idx.to_vec());
        }
    }
}

pub fn read_ply<T: Real>(path: &Path) -> Result<PlyContents<T>, CoreError> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CoreError::io(path, e))?;
    let header = parse_header(&bytes)?;
    parse_body(&bytes, &header, path)
}

/// Import a triangle mesh, fan-triangulating larger polygons.
pub fn import_mesh_ply<T: Real>(path: &Path) -> Result<TriangleMesh<T>, CoreError> {
    let contents = read_ply::<T>(path)?;
    let nv = contents.vertices.len();
    let mut triangles = Vec::new();
    for face in &contents.faces {
        for &i in face {
            if i >= nv {
                return Err(CoreError::FaceIndexOutOfRange {
                    index: i,
                    vertex_count: nv,
                });
            }
        }
        if face.len() < 3 {
            return Err(CoreError::PlyBody(format!(
                "face with {} vertices",
                face.len()
            )));
        }
        for k in 1..face.len() - 1 {
            triangles.push([face[0], face[k], face[k + 1]]);
        }
    }
    Ok(TriangleMesh {
        vertices: contents.vertices,
        triangles,
        vertex_normals: contents.normals.unwrap_or_default(),
    })
}

/// Import an oriented point cloud; `normals` is `None` when the file has no
/// nx/ny/nz properties.
pub struct PointCloud<T> {
    pub points: Vec<Vec3<T>>,
    pub normals: Option<Vec<Vec3<T>>>,
}

pub fn import_pointcloud_ply<T: Real>(path: &Path) -> Result<PointCloud<T>, CoreError> {
    let contents = read_ply::<T>(path)?;
    Ok(PointCloud {
        points: contents.vertices,
        normals: contents.normals,
    })
}

pub fn export_mesh_ply<T: Real>(
    mesh: &TriangleMesh<T>,
    path: &Path,
    format: PlyFormat,
) -> Result<(), CoreError> {
    debug_assert!(mesh.indices_in_range());
    let file = File::create(path).map_err(|e| CoreError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let has_normals = mesh.vertex_normals.len() == mesh.vertices.len();
    let res = (|| -> std::io::Result<()> {
        writeln!(w, "ply")?;
        match format {
            PlyFormat::Ascii => writeln!(w, "format ascii 1.0")?,
            PlyFormat::BinaryLittleEndian => writeln!(w, "format binary_little_endian 1.0")?,
        }
        writeln!(w, "element vertex {}", mesh.vertices.len())?;
        writeln!(w, "property float x")?;
        writeln!(w, "property float y")?;
        writeln!(w, "property float z")?;
        if has_normals {
            writeln!(w, "property float nx")?;
            writeln!(w, "property float ny")?;
            writeln!(w, "property float nz")?;
        }
        writeln!(w, "element face {}", mesh.triangles.len())?;
        writeln!(w, "property list uchar int vertex_indices")?;
        writeln!(w, "end_header")?;
        match format {
            PlyFormat::Ascii => {
                for (i, v) in mesh.vertices.iter().enumerate() {
                    write!(w, "{} {} {}", v.x.to_f32_bits(), v.y.to_f32_bits(), v.z.to_f32_bits())?;
                    if has_normals {
                        let n = mesh.vertex_normals[i];
                        write!(
                            w,
                            " {} {} {}",
                            n.x.to_f32_bits(),
                            n.y.to_f32_bits(),
                            n.z.to_f32_bits()
                        )?;
                    }
                    writeln!(w)?;
                }
                for t in &mesh.triangles {
                    writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
                }
            }
            PlyFormat::BinaryLittleEndian => {
                for (i, v) in mesh.vertices.iter().enumerate() {
                    w.write_f32::<LittleEndian>(v.x.to_f32_bits())?;
                    w.write_f32::<LittleEndian>(v.y.to_f32_bits())?;
                    w.write_f32::<LittleEndian>(v.z.to_f32_bits())?;
                    if has_normals {
                        let n = mesh.vertex_normals[i];
                        w.write_f32::<LittleEndian>(n.x.to_f32_bits())?;
                        w.write_f32::<LittleEndian>(n.y.to_f32_bits())?;
                        w.write_f32::<LittleEndian>(n.z.to_f32_bits())?;
                    }
                }
                for t in &mesh.triangles {
                    w.write_u8(3)?;
                    w.write_i32::<LittleEndian>(t[0] as i32)?;
                    w.write_i32::<LittleEndian>(t[1] as i32)?;
                    w.write_i32::<LittleEndian>(t[2] as i32)?;
                }
            }
        }
        w.flush()
    })();
    res.map_err(|e| CoreError::io(path, e))
}

/// Export an oriented point cloud (vertex-only PLY).
pub fn export_pointcloud_ply<T: Real>(
    points: &[Vec3<T>],
    normals: Option<&[Vec3<T>]>,
    path: &Path,
    format: PlyFormat,
) -> Result<(), CoreError> {
    let mesh = TriangleMesh {
        vertices: points.to_vec(),
        triangles: Vec::new(),
        vertex_normals: normals.map(|n| n.to_vec()).unwrap_or_default(),
    };
    export_mesh_ply(&mesh, path, format)
}
