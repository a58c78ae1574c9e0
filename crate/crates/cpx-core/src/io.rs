//! File formats shared by the command-line driver and the tests: point-cloud
//! CSV (`re1,im1,re2,im2[,weight]`, no header), scalar-field CSV
//! (`re1,im1,re2,im2,value`), node CSV (`order,re1,im1,re2,im2,pivot_log`),
//! and serde-based JSON for polynomials and reports.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::cpoly::CPoint;
use crate::error::{Error, Result};

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidInput(format!("line {line}: bad number {field:?}")))
}

/// Reads a point cloud; the optional fifth column is a weight. Mixing rows
/// with and without weights is rejected.
pub fn read_points_csv<R: Read>(reader: R) -> Result<(Vec<CPoint>, Option<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut points = Vec::new();
    let mut weights: Option<Vec<f64>> = None;
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        let line = i + 1;
        let fields: Vec<&str> = record.iter().collect();
        if fields.len() == 1 && fields[0].trim().is_empty() {
            continue;
        }
        if fields.len() != 4 && fields.len() != 5 {
            return Err(Error::InvalidInput(format!(
                "line {line}: expected 4 or 5 fields, got {}",
                fields.len()
            )));
        }
        let re1 = parse_f64(fields[0], line)?;
        let im1 = parse_f64(fields[1], line)?;
        let re2 = parse_f64(fields[2], line)?;
        let im2 = parse_f64(fields[3], line)?;
        points.push(CPoint::new(
            Complex64::new(re1, im1),
            Complex64::new(re2, im2),
        ));
        match (fields.len(), &mut weights) {
            (5, Some(ws)) => ws.push(parse_f64(fields[4], line)?),
            (5, None) if points.len() == 1 => {
                weights = Some(vec![parse_f64(fields[4], line)?]);
            }
            (4, None) => {}
            _ => {
                return Err(Error::InvalidInput(format!(
                    "line {line}: inconsistent weight column"
                )));
            }
        }
    }
    Ok((points, weights))
}

pub fn write_points_csv<W: Write>(
    mut writer: W,
    points: &[CPoint],
    weights: Option<&[f64]>,
) -> Result<()> {
    if let Some(ws) = weights {
        if ws.len() != points.len() {
            return Err(Error::InvalidInput(
                "weight count does not match point count".into(),
            ));
        }
    }
    for (i, p) in points.iter().enumerate() {
        let base = format!("{},{},{},{}", p.z1.re, p.z1.im, p.z2.re, p.z2.im);
        let line = match weights {
            Some(ws) => format!("{base},{}\n", ws[i]),
            None => format!("{base}\n"),
        };
        writer
            .write_all(line.as_bytes())
            .map_err(|e| Error::InvalidInput(format!("write: {e}")))?;
    }
    Ok(())
}

/// Scalar field rows `re1,im1,re2,im2,value`; `-inf` values are written as
/// `-inf` and parsed back.
pub fn write_field_csv<W: Write>(mut writer: W, points: &[CPoint], values: &[f64]) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::InvalidInput(
            "value count does not match point count".into(),
        ));
    }
    for (p, v) in points.iter().zip(values) {
        let line = format!("{},{},{},{},{}\n", p.z1.re, p.z1.im, p.z2.re, p.z2.im, v);
        writer
            .write_all(line.as_bytes())
            .map_err(|e| Error::InvalidInput(format!("write: {e}")))?;
    }
    Ok(())
}

/// Node rows `order,re1,im1,re2,im2,pivot_log` in selection order.
pub fn write_nodes_csv<W: Write>(
    mut writer: W,
    points: &[CPoint],
    pivot_logs: &[f64],
) -> Result<()> {
    if points.len() != pivot_logs.len() {
        return Err(Error::InvalidInput(
            "pivot count does not match node count".into(),
        ));
    }
    for (i, (p, g)) in points.iter().zip(pivot_logs).enumerate() {
        let line = format!(
            "{},{},{},{},{},{}\n",
            i, p.z1.re, p.z1.im, p.z2.re, p.z2.im, g
        );
        writer
            .write_all(line.as_bytes())
            .map_err(|e| Error::InvalidInput(format!("write: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_round_trip_without_weights() {
        let pts = vec![
            CPoint::new(Complex64::new(1.0, -0.5), Complex64::new(0.25, 2.0)),
            CPoint::new(Complex64::new(-3.5, 0.0), Complex64::new(0.0, 1e-3)),
        ];
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &pts, None).unwrap();
        let (back, w) = read_points_csv(buf.as_slice()).unwrap();
        assert_eq!(back, pts);
        assert!(w.is_none());
    }

    #[test]
    fn points_round_trip_with_weights() {
        let pts = vec![
            CPoint::from_re(1.0, 2.0),
            CPoint::from_re(3.0, 4.0),
        ];
        let ws = vec![0.25, 0.75];
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &pts, Some(&ws)).unwrap();
        let (back, w) = read_points_csv(buf.as_slice()).unwrap();
        assert_eq!(back, pts);
        assert_eq!(w.unwrap(), ws);
    }

    #[test]
    fn bad_rows_are_reported_with_line_numbers() {
        let data = "1,2,3,4\n1,2,3\n";
        let err = read_points_csv(data.as_bytes()).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 2"), "{msg}");

        let data2 = "1,2,3,4,0.5\n1,2,3,4\n";
        assert!(read_points_csv(data2.as_bytes()).is_err());

        let data3 = "1,2,oops,4\n";
        let err3 = read_points_csv(data3.as_bytes()).unwrap_err();
        assert!(format!("{err3}").contains("oops"));
    }

    #[test]
    fn field_rows_keep_infinities() {
        let pts = vec![CPoint::from_re(0.0, 0.0)];
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &pts, &[f64::NEG_INFINITY]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.trim().ends_with("-inf"));
    }
}
