use std::fmt::Write as _;

use super::{BBox2D, ClassId, Dims, Object3D};
use crate::error::{Error, Result};

const FIELD_NAMES: [&str; 16] = [
    "type",
    "truncated",
    "occluded",
    "alpha",
    "bbox_left",
    "bbox_top",
    "bbox_right",
    "bbox_bottom",
    "height",
    "width",
    "length",
    "x",
    "y",
    "z",
    "rotation_y",
    "score",
];

/// Parses one label line (reported as line 1 on error).
pub fn parse_label_line(line: &str) -> Result<Object3D> {
    parse_line_at(line, 1)
}

/// Parses a whole label file. Blank lines are skipped; errors carry the
/// 1-based line number within `text`.
pub fn parse_label_file(text: &str) -> Result<Vec<Object3D>> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| parse_line_at(line, i + 1))
        .collect()
}

fn parse_line_at(line: &str, line_no: usize) -> Result<Object3D> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 15 && fields.len() != 16 {
        return Err(Error::FieldCount {
            line: line_no,
            count: fields.len(),
        });
    }

    let num = |i: usize| -> Result<f64> {
        fields[i]
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::ParseField {
                line: line_no,
                field: FIELD_NAMES[i],
                value: fields[i].to_string(),
            })
    };

    let occluded = fields[2].parse::<i32>().map_err(|_| Error::ParseField {
        line: line_no,
        field: FIELD_NAMES[2],
        value: fields[2].to_string(),
    })?;

    let obj = Object3D {
        class: ClassId::from(fields[0]),
        truncated: num(1)?,
        occluded,
        alpha: num(3)?,
        bbox: BBox2D::new(num(4)?, num(5)?, num(6)?, num(7)?),
        dims: Dims::new(num(8)?, num(9)?, num(10)?),
        location: [num(11)?, num(12)?, num(13)?],
        rotation_y: num(14)?,
        score: if fields.len() == 16 { Some(num(15)?) } else { None },
    };
    validate(&obj, line_no)?;
    Ok(obj)
}

fn validate(obj: &Object3D, line_no: usize) -> Result<()> {
    let invalid = |message: String| Error::InvalidRecord { line: line_no, message };
    if !(-1..=3).contains(&obj.occluded) {
        return Err(invalid(format!("occluded {} outside -1..=3", obj.occluded)));
    }
    let b = &obj.bbox;
    if b.right < b.left || b.bottom < b.top {
        return Err(invalid(format!(
            "bbox ({}, {}, {}, {}) has negative extent",
            b.left, b.top, b.right, b.bottom
        )));
    }
    let d = &obj.dims;
    if !d.is_sentinel() && (d.h < 0.0 || d.w < 0.0 || d.l < 0.0) {
        return Err(invalid(format!("negative dimensions ({}, {}, {})", d.h, d.w, d.l)));
    }
    Ok(())
}

/// Formats a value as KITTI does (`%.2f`) whenever that is lossless, and with
/// the shortest round-tripping representation otherwise.
fn fmt_num(out: &mut String, v: f64) {
    let two = format!("{v:.2}");
    let exact = two.parse::<f64>().map(|p| (p - v).abs() <= 1e-9).unwrap_or(false);
    if !exact {
        let _ = write!(out, "{v}");
    } else if two == "-0.00" {
        out.push_str("0.00");
    } else {
        out.push_str(&two);
    }
}

/// One line, no trailing newline. 16 fields when the object has a score.
pub fn serialize_object(obj: &Object3D) -> String {
    let mut out = String::with_capacity(96);
    out.push_str(obj.class.as_str());
    out.push(' ');
    fmt_num(&mut out, obj.truncated);
    let _ = write!(out, " {}", obj.occluded);
    let b = &obj.bbox;
    let d = &obj.dims;
    let [x, y, z] = obj.location;
    for v in [
        obj.alpha,
        b.left,
        b.top,
        b.right,
        b.bottom,
        d.h,
        d.w,
        d.l,
        x,
        y,
        z,
        obj.rotation_y,
    ] {
        out.push(' ');
        fmt_num(&mut out, v);
    }
    if let Some(score) = obj.score {
        out.push(' ');
        fmt_num(&mut out, score);
    }
    out
}

/// Newline-terminated lines, one per object. An empty list gives "".
pub fn serialize_label_file(objects: &[Object3D]) -> String {
    let mut out = String::new();
    for obj in objects {
        out.push_str(&serialize_object(obj));
        out.push('\n');
    }
    out
}
