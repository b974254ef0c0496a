//! Regular two-dimensional slices of the field and their CSV serialization.
//!
//! A slice fixes one cylindrical coordinate and samples the field on a
//! regular grid over the other two.  Values are stored row-major with the
//! first axis outermost.  The CSV format carries the full slice definition in
//! `#`-prefixed metadata lines followed by a header and one row per sample;
//! floats are printed in shortest round-trip form, so writing and re-reading
//! a slice reproduces it bit for bit.

use crate::fields::{em_field, EmSample};
use crate::numerics::QuadratureSettings;
use crate::pulse::{scalar_field, AxiconGeometry, CylPoint};
use crate::spectrum::Spectrum;
use crate::{Complex, Error, Result};
use rayon::prelude::*;
use std::io::{BufRead, Write};

/// One regularly spaced axis of a slice.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisGrid {
    pub name: String,
    pub min: f64,
    pub step: f64,
    pub count: usize,
}

impl AxisGrid {
    pub fn new(name: &str, min: f64, step: f64, count: usize) -> Result<Self> {
        let grid = AxisGrid { name: name.to_string(), min, step, count };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(',') || self.name.contains(char::is_whitespace) {
            return Err(Error::Config(format!("invalid axis name {:?}", self.name)));
        }
        if !self.min.is_finite() || !self.step.is_finite() {
            return Err(Error::NonFinite("axis grid bound"));
        }
        if self.step <= 0.0 {
            return Err(Error::Config(format!("axis step must be positive, got {}", self.step)));
        }
        if self.count == 0 {
            return Err(Error::Config("axis needs at least one sample".into()));
        }
        Ok(())
    }

    pub fn value(&self, index: usize) -> f64 {
        self.min + self.step * index as f64
    }
}

/// Which plane to sample: two swept axes plus one fixed coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct SlicePlan {
    pub axis1: AxisGrid,
    pub axis2: AxisGrid,
    pub fixed_name: String,
    pub fixed_value: f64,
}

impl SlicePlan {
    pub fn new(axis1: AxisGrid, axis2: AxisGrid, fixed_name: &str, fixed_value: f64) -> Result<Self> {
        let plan = SlicePlan { axis1, axis2, fixed_name: fixed_name.to_string(), fixed_value };
        plan.validate()?;
        Ok(plan)
    }

    fn validate(&self) -> Result<()> {
        self.axis1.validate()?;
        self.axis2.validate()?;
        if !self.fixed_value.is_finite() {
            return Err(Error::NonFinite("fixed coordinate"));
        }
        let names = [&self.axis1.name, &self.axis2.name, &self.fixed_name];
        for i in 0..3 {
            for j in i + 1..3 {
                if names[i] == names[j] {
                    return Err(Error::Config(format!("slice axes must be distinct, got {names:?}")));
                }
            }
        }
        Ok(())
    }

    /// Map a pair of swept values to a lab-frame point, requiring the three
    /// names to be a permutation of `t`, `rho`, `z`.
    fn lab_point(&self, v1: f64, v2: f64) -> Result<CylPoint> {
        let mut t = None;
        let mut rho = None;
        let mut z = None;
        for (name, value) in [
            (self.axis1.name.as_str(), v1),
            (self.axis2.name.as_str(), v2),
            (self.fixed_name.as_str(), self.fixed_value),
        ] {
            match name {
                "t" => t = Some(value),
                "rho" => rho = Some(value),
                "z" => z = Some(value),
                other => {
                    return Err(Error::Config(format!(
                        "unknown coordinate {other:?}; lab slices use t, rho, z"
                    )))
                }
            }
        }
        match (t, rho, z) {
            (Some(t), Some(rho), Some(z)) => Ok(CylPoint::new(t, rho, z)),
            _ => Err(Error::Config("slice axes must cover t, rho and z exactly once".into())),
        }
    }
}

/// Pulse parameters recorded alongside sampled values.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMeta {
    pub eta: f64,
    pub t_window: f64,
    pub spectrum: String,
}

impl SliceMeta {
    pub fn describe(geometry: &AxiconGeometry, spectrum: &Spectrum) -> Self {
        SliceMeta {
            eta: geometry.eta(),
            t_window: geometry.t_window(),
            spectrum: spectrum.to_string(),
        }
    }
}

/// A sampled complex scalar slice.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSlice {
    pub plan: SlicePlan,
    pub meta: SliceMeta,
    /// Row-major, `axis1` outermost: `values[i1 * axis2.count + i2]`.
    pub values: Vec<Complex>,
}

/// A sampled electromagnetic slice.
#[derive(Clone, Debug, PartialEq)]
pub struct EmFieldSlice {
    pub plan: SlicePlan,
    pub meta: SliceMeta,
    pub values: Vec<EmSample>,
}

/// Sample the scalar field over a slice plan.  Rows are computed in
/// parallel; the result is independent of the worker count.
pub fn sample_scalar_slice(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    plan: &SlicePlan,
    settings: &QuadratureSettings,
) -> Result<FieldSlice> {
    plan.validate()?;
    let n2 = plan.axis2.count;
    let values: Vec<Complex> = (0..plan.axis1.count * n2)
        .into_par_iter()
        .map(|idx| {
            let point = plan.lab_point(plan.axis1.value(idx / n2), plan.axis2.value(idx % n2))?;
            scalar_field(geometry, spectrum, &point, settings)
        })
        .collect::<Result<_>>()?;
    Ok(FieldSlice { plan: plan.clone(), meta: SliceMeta::describe(geometry, spectrum), values })
}

/// Sample the electromagnetic components over a slice plan.
pub fn sample_em_slice(
    geometry: &AxiconGeometry,
    spectrum: &Spectrum,
    plan: &SlicePlan,
    settings: &QuadratureSettings,
) -> Result<EmFieldSlice> {
    plan.validate()?;
    let n2 = plan.axis2.count;
    let values: Vec<EmSample> = (0..plan.axis1.count * n2)
        .into_par_iter()
        .map(|idx| {
            let point = plan.lab_point(plan.axis1.value(idx / n2), plan.axis2.value(idx % n2))?;
            em_field(geometry, spectrum, &point, settings)
        })
        .collect::<Result<_>>()?;
    Ok(EmFieldSlice { plan: plan.clone(), meta: SliceMeta::describe(geometry, spectrum), values })
}

fn write_metadata<W: Write>(out: &mut W, plan: &SlicePlan, meta: &SliceMeta) -> Result<()> {
    for (key, value) in [
        ("axis1_name", plan.axis1.name.clone()),
        ("axis1_min", plan.axis1.min.to_string()),
        ("axis1_step", plan.axis1.step.to_string()),
        ("axis1_count", plan.axis1.count.to_string()),
        ("axis2_name", plan.axis2.name.clone()),
        ("axis2_min", plan.axis2.min.to_string()),
        ("axis2_step", plan.axis2.step.to_string()),
        ("axis2_count", plan.axis2.count.to_string()),
        ("fixed_name", plan.fixed_name.clone()),
        ("fixed_value", plan.fixed_value.to_string()),
        ("eta", meta.eta.to_string()),
        ("t_window", meta.t_window.to_string()),
        ("spectrum", meta.spectrum.clone()),
    ] {
        writeln!(out, "# {key},{value}")?;
    }
    Ok(())
}

struct MetadataBlock {
    plan: SlicePlan,
    meta: SliceMeta,
    header: String,
    rest: Vec<String>,
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("metadata {key}: expected a float, got {value:?}")))
}

fn parse_metadata<R: BufRead>(input: R) -> Result<MetadataBlock> {
    let mut pairs = Vec::new();
    let mut header = None;
    let mut rest = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(meta_line) = line.strip_prefix('#') {
            let body = meta_line.trim_start();
            let (key, value) = body
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("malformed metadata line {line:?}")))?;
            pairs.push((key.to_string(), value.to_string()));
        } else if header.is_none() {
            header = Some(line);
        } else {
            rest.push(line);
        }
    }
    let lookup = |key: &str| -> Result<String> {
        pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Parse(format!("missing metadata key {key:?}")))
    };
    let axis = |prefix: &str| -> Result<AxisGrid> {
        Ok(AxisGrid {
            name: lookup(&format!("{prefix}_name"))?,
            min: parse_f64(prefix, &lookup(&format!("{prefix}_min"))?)?,
            step: parse_f64(prefix, &lookup(&format!("{prefix}_step"))?)?,
            count: lookup(&format!("{prefix}_count"))?
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("metadata {prefix}_count is not an integer")))?,
        })
    };
    let plan = SlicePlan {
        axis1: axis("axis1")?,
        axis2: axis("axis2")?,
        fixed_name: lookup("fixed_name")?,
        fixed_value: parse_f64("fixed_value", &lookup("fixed_value")?)?,
    };
    plan.validate()?;
    let meta = SliceMeta {
        eta: parse_f64("eta", &lookup("eta")?)?,
        t_window: parse_f64("t_window", &lookup("t_window")?)?,
        spectrum: lookup("spectrum")?,
    };
    Ok(MetadataBlock {
        plan,
        meta,
        header: header.ok_or_else(|| Error::Parse("missing CSV header".into()))?,
        rest,
    })
}

fn row_fields(line: &str, expected: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} comma-separated fields, got {} in {line:?}",
            fields.len()
        )));
    }
    fields.iter().map(|f| parse_f64("row", f)).collect()
}

impl FieldSlice {
    pub fn value(&self, i1: usize, i2: usize) -> Complex {
        self.values[i1 * self.plan.axis2.count + i2]
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        write_metadata(out, &self.plan, &self.meta)?;
        writeln!(out, "axis1,axis2,re,im")?;
        for i1 in 0..self.plan.axis1.count {
            for i2 in 0..self.plan.axis2.count {
                let v = self.value(i1, i2);
                writeln!(out, "{},{},{},{}", self.plan.axis1.value(i1), self.plan.axis2.value(i2), v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let block = parse_metadata(input)?;
        if block.header != "axis1,axis2,re,im" {
            return Err(Error::Parse(format!("unexpected scalar slice header {:?}", block.header)));
        }
        let expected = block.plan.axis1.count * block.plan.axis2.count;
        if block.rest.len() != expected {
            return Err(Error::Parse(format!(
                "expected {expected} data rows, found {}",
                block.rest.len()
            )));
        }
        let mut values = Vec::with_capacity(expected);
        for line in &block.rest {
            let f = row_fields(line, 4)?;
            values.push(Complex::new(f[2], f[3]));
        }
        Ok(FieldSlice { plan: block.plan, meta: block.meta, values })
    }
}

impl EmFieldSlice {
    pub fn value(&self, i1: usize, i2: usize) -> EmSample {
        self.values[i1 * self.plan.axis2.count + i2]
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        write_metadata(out, &self.plan, &self.meta)?;
        writeln!(out, "axis1,axis2,Etheta_re,Etheta_im,Brho_re,Brho_im,Bz_re,Bz_im")?;
        for i1 in 0..self.plan.axis1.count {
            for i2 in 0..self.plan.axis2.count {
                let v = self.value(i1, i2);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    self.plan.axis1.value(i1),
                    self.plan.axis2.value(i2),
                    v.e_theta.re,
                    v.e_theta.im,
                    v.b_rho.re,
                    v.b_rho.im,
                    v.b_z.re,
                    v.b_z.im
                )?;
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let block = parse_metadata(input)?;
        if block.header != "axis1,axis2,Etheta_re,Etheta_im,Brho_re,Brho_im,Bz_re,Bz_im" {
            return Err(Error::Parse(format!("unexpected em slice header {:?}", block.header)));
        }
        let expected = block.plan.axis1.count * block.plan.axis2.count;
        if block.rest.len() != expected {
            return Err(Error::Parse(format!(
                "expected {expected} data rows, found {}",
                block.rest.len()
            )));
        }
        let mut values = Vec::with_capacity(expected);
        for line in &block.rest {
            let f = row_fields(line, 8)?;
            values.push(EmSample {
                e_theta: Complex::new(f[2], f[3]),
                b_rho: Complex::new(f[4], f[5]),
                b_z: Complex::new(f[6], f[7]),
            });
        }
        Ok(EmFieldSlice { plan: block.plan, meta: block.meta, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn quarter() -> AxiconGeometry {
        AxiconGeometry::new(FRAC_PI_4, 1.0).unwrap()
    }

    fn rect1() -> Spectrum {
        Spectrum::rectangular(1.0).unwrap()
    }

    fn q() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    fn demo_plan() -> SlicePlan {
        SlicePlan::new(
            AxisGrid::new("z", -0.3, 0.1, 5).unwrap(),
            AxisGrid::new("rho", 0.0, 0.7, 3).unwrap(),
            "t",
            0.25,
        )
        .unwrap()
    }

    #[test]
    fn plans_validate_names_and_grids() {
        assert!(AxisGrid::new("", 0.0, 0.1, 3).is_err());
        assert!(AxisGrid::new("z", 0.0, 0.0, 3).is_err());
        assert!(AxisGrid::new("z", 0.0, 0.1, 0).is_err());
        assert!(SlicePlan::new(
            AxisGrid::new("z", 0.0, 0.1, 2).unwrap(),
            AxisGrid::new("z", 0.0, 0.1, 2).unwrap(),
            "t",
            0.0
        )
        .is_err());
        // unknown coordinate name surfaces when sampling
        let bad = SlicePlan::new(
            AxisGrid::new("q", 0.0, 0.1, 2).unwrap(),
            AxisGrid::new("rho", 0.0, 0.1, 2).unwrap(),
            "t",
            0.0,
        )
        .unwrap();
        assert!(sample_scalar_slice(&quarter(), &rect1(), &bad, &q()).is_err());
    }

    #[test]
    fn sampling_matches_pointwise_evaluation() {
        let slice = sample_scalar_slice(&quarter(), &rect1(), &demo_plan(), &q()).unwrap();
        assert_eq!(slice.values.len(), 15);
        for i1 in [0usize, 2, 4] {
            for i2 in [0usize, 1, 2] {
                let point = CylPoint::new(0.25, 0.7 * i2 as f64, -0.3 + 0.1 * i1 as f64);
                let direct = scalar_field(&quarter(), &rect1(), &point, &q()).unwrap();
                assert_eq!(slice.value(i1, i2), direct);
            }
        }
    }

    #[test]
    fn scalar_csv_round_trips_bit_for_bit() {
        let slice = sample_scalar_slice(&quarter(), &rect1(), &demo_plan(), &q()).unwrap();
        let mut buffer = Vec::new();
        slice.write_csv(&mut buffer).unwrap();
        let back = FieldSlice::read_csv(buffer.as_slice()).unwrap();
        assert_eq!(back.plan, slice.plan);
        assert_eq!(back.meta.eta.to_bits(), slice.meta.eta.to_bits());
        assert_eq!(back.meta.t_window.to_bits(), slice.meta.t_window.to_bits());
        assert_eq!(back.meta.spectrum, slice.meta.spectrum);
        assert_eq!(back.values.len(), slice.values.len());
        for (a, b) in back.values.iter().zip(slice.values.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        // and writing the parsed slice again reproduces the same bytes
        let mut again = Vec::new();
        back.write_csv(&mut again).unwrap();
        assert_eq!(buffer, again);
    }

    #[test]
    fn em_csv_round_trips_bit_for_bit() {
        let plan = SlicePlan::new(
            AxisGrid::new("rho", 0.0, 0.9, 4).unwrap(),
            AxisGrid::new("t", -0.5, 0.5, 3).unwrap(),
            "z",
            0.1,
        )
        .unwrap();
        let slice = sample_em_slice(&quarter(), &rect1(), &plan, &q()).unwrap();
        let mut buffer = Vec::new();
        slice.write_csv(&mut buffer).unwrap();
        let back = EmFieldSlice::read_csv(buffer.as_slice()).unwrap();
        let mut again = Vec::new();
        back.write_csv(&mut again).unwrap();
        assert_eq!(buffer, again);
    }

    #[test]
    fn truncated_csv_is_rejected() {
        let slice = sample_scalar_slice(&quarter(), &rect1(), &demo_plan(), &q()).unwrap();
        let mut buffer = Vec::new();
        slice.write_csv(&mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let truncated: String = text.lines().take(16).map(|l| format!("{l}\n")).collect();
        assert!(FieldSlice::read_csv(truncated.as_bytes()).is_err());
        let garbled = text.replace("axis1,axis2,re,im", "a,b");
        assert!(FieldSlice::read_csv(garbled.as_bytes()).is_err());
    }
}
