//! JSON model files.
//!
//! A model stores the anchors and, for every unit interval, the Bézier pieces
//! of the two tangent-space curves used there. Reals are written with 17
//! significant digits so that loading reproduces evaluation bit for bit.

use std::io;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::blend::{AnchorSet, BlendedSpline, IntervalPieces};
use crate::error::{Error, Result};
use crate::manifold::{AnyManifold, Manifold, ManifoldDescriptor, Point};
use crate::spline1d::CubicPiece;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub breakpoints: [f64; 2],
    pub control: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub i: usize,
    pub left_pieces: Vec<PieceRecord>,
    pub right_pieces: Vec<PieceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorRecord {
    pub indices: Vec<usize>,
    pub points: Vec<Vec<f64>>,
}

/// On-disk form of a fitted [`BlendedSpline`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub manifold: ManifoldDescriptor,
    pub n: usize,
    /// Finite values are numbers; `+∞` is the string `"inf"`.
    #[serde(serialize_with = "write_lambda", deserialize_with = "read_lambda")]
    pub lambda: f64,
    pub times: Vec<f64>,
    pub anchors: AnchorRecord,
    pub intervals: Vec<IntervalRecord>,
}

fn write_lambda<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn read_lambda<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Text(s) if s == "inf" => Ok(f64::INFINITY),
        Raw::Text(s) => Err(de::Error::custom(format!("invalid lambda `{s}`"))),
    }
}

fn piece_record(p: &CubicPiece) -> PieceRecord {
    PieceRecord {
        breakpoints: p.breakpoints,
        control: p.control.to_vec(),
    }
}

fn piece_from_record(r: &PieceRecord) -> Result<CubicPiece> {
    let control: [Vec<f64>; 4] = r.control.clone().try_into().map_err(|c: Vec<Vec<f64>>| {
        Error::InvalidInput(format!(
            "a cubic piece needs 4 control points, found {}",
            c.len()
        ))
    })?;
    Ok(CubicPiece {
        breakpoints: r.breakpoints,
        control,
    })
}

impl ModelFile {
    pub fn from_spline<M: Manifold>(spline: &BlendedSpline<M>) -> Self {
        ModelFile {
            format_version: FORMAT_VERSION,
            manifold: spline.manifold().descriptor(),
            n: spline.n(),
            lambda: spline.lambda(),
            times: spline.times().to_vec(),
            anchors: AnchorRecord {
                indices: spline.anchors().indices().to_vec(),
                points: spline
                    .anchors()
                    .points()
                    .iter()
                    .map(|p| p.coords().to_vec())
                    .collect(),
            },
            intervals: spline
                .intervals()
                .iter()
                .enumerate()
                .map(|(i, iv)| IntervalRecord {
                    i,
                    left_pieces: iv.left.iter().map(piece_record).collect(),
                    right_pieces: iv.right.iter().map(piece_record).collect(),
                })
                .collect(),
        }
    }

    pub fn into_spline(self) -> Result<BlendedSpline<AnyManifold>> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported model format version {}",
                self.format_version
            )));
        }
        if self.intervals.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "model declares n = {} but stores {} intervals",
                self.n,
                self.intervals.len()
            )));
        }
        let manifold = AnyManifold::from_descriptor(self.manifold)?;
        let anchors = AnchorSet::new(
            self.anchors.indices,
            self.anchors.points.into_iter().map(Point::new).collect(),
        )?;
        let intervals = self
            .intervals
            .iter()
            .enumerate()
            .map(|(k, rec)| {
                if rec.i != k {
                    return Err(Error::InvalidInput(format!(
                        "interval records out of order: expected {k}, found {}",
                        rec.i
                    )));
                }
                Ok(IntervalPieces {
                    left: rec
                        .left_pieces
                        .iter()
                        .map(piece_from_record)
                        .collect::<Result<_>>()?,
                    right: rec
                        .right_pieces
                        .iter()
                        .map(piece_from_record)
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BlendedSpline::from_parts(manifold, self.lambda, self.times, anchors, intervals)
    }

    /// Number of stored tangent control vectors.
    pub fn tangent_control_count(&self) -> usize {
        self.intervals
            .iter()
            .flat_map(|iv| iv.left_pieces.iter().chain(&iv.right_pieces))
            .map(|p| p.control.len())
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision::new());
        self.serialize(&mut ser)
            .map_err(|e| Error::InvalidInput(format!("cannot serialize model: {e}")))?;
        buf.push(b'\n');
        Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed model file: {e}")))
    }
}

pub fn save_model<M: Manifold>(spline: &BlendedSpline<M>, path: &Path) -> Result<()> {
    let text = ModelFile::from_spline(spline).to_json()?;
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn load_model(path: &Path) -> Result<BlendedSpline<AnyManifold>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    ModelFile::from_json(&text)?.into_spline()
}

pub(crate) fn io_error(path: &Path, e: io::Error) -> Error {
    Error::InvalidInput(format!("{}: {e}", path.display()))
}

/// Pretty JSON with every float written as `d.dddddddddddddddde±x`.
struct FullPrecision<'a> {
    pretty: PrettyFormatter<'a>,
}

impl FullPrecision<'_> {
    fn new() -> Self {
        FullPrecision {
            pretty: PrettyFormatter::with_indent(b" "),
        }
    }
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}
