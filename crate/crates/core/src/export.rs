//! CSV and binary PGM writers. Floats use Rust's shortest round-trip
//! formatting, so identical inputs produce identical bytes.

use std::io::{self, Write};

use crate::lattice::{CoefficientRow, DomainMap};
use crate::phasematch::{PatternMap, TuningRow};
use crate::quantum::{BudgetRow, FringeScan};

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_coefficient_table<W: Write>(mut w: W, rows: &[CoefficientRow]) -> io::Result<()> {
    writeln!(w, "m,n,analytic,numeric,abs_error")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.m, r.n, r.analytic, r.numeric, r.abs_error)?;
    }
    Ok(())
}

pub fn write_domain_csv<W: Write>(mut w: W, map: &DomainMap) -> io::Result<()> {
    for y in 0..map.height {
        let row: Vec<String> = (0..map.width).map(|x| map.get(x, y).to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Binary 8-bit PGM (P5), row-major, first row on top.
pub fn write_pgm<W: Write>(mut w: W, width: usize, height: usize, gray: &[u8]) -> io::Result<()> {
    if gray.len() != width * height {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{} pixels for a {width}x{height} image", gray.len()),
        ));
    }
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(gray)
}

pub fn write_domain_pgm<W: Write>(w: W, map: &DomainMap) -> io::Result<()> {
    write_pgm(w, map.width, map.height, &map.to_gray())
}

pub fn write_pattern_csv<W: Write>(mut w: W, map: &PatternMap) -> io::Result<()> {
    writeln!(w, "theta_y_deg,theta_z_deg,intensity")?;
    for iz in 0..map.grid {
        for iy in 0..map.grid {
            writeln!(
                w,
                "{},{},{}",
                map.angle_deg(iy),
                map.angle_deg(iz),
                map.get(iy, iz)
            )?;
        }
    }
    Ok(())
}

/// Intensity scaled to the map maximum; an all-zero map stays black.
pub fn pattern_to_gray(map: &PatternMap) -> Vec<u8> {
    let peak = map.intensity.iter().copied().fold(0.0, f64::max);
    map.intensity
        .iter()
        .map(|&v| if peak > 0.0 { (255.0 * v / peak).round() as u8 } else { 0 })
        .collect()
}

pub fn write_pattern_pgm<W: Write>(w: W, map: &PatternMap) -> io::Result<()> {
    write_pgm(w, map.grid, map.grid, &pattern_to_gray(map))
}

pub fn write_fringe_csv<W: Write>(mut w: W, scan: &FringeScan) -> io::Result<()> {
    writeln!(w, "delay_um,singles1,singles2,coincidence_prob")?;
    for i in 0..scan.delays_um.len() {
        writeln!(
            w,
            "{},{},{},{}",
            scan.delays_um[i], scan.singles1[i], scan.singles2[i], scan.coincidences[i]
        )?;
    }
    Ok(())
}

pub fn write_budget_csv<W: Write>(mut w: W, rows: &[BudgetRow]) -> io::Result<()> {
    writeln!(w, "cause,visibility_alone,note")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.cause, r.visibility_alone, csv_field(&r.note))?;
    }
    Ok(())
}

/// Rows of `(rotation in degrees, visibility)`.
pub fn write_polarization_csv<W: Write>(mut w: W, rows: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "rotation_deg,visibility")?;
    for &(theta_deg, v) in rows {
        writeln!(w, "{theta_deg},{v}")?;
    }
    Ok(())
}

pub fn write_tuning_csv<W: Write>(mut w: W, rows: &[TuningRow]) -> io::Result<()> {
    writeln!(
        w,
        "temperature_c,regime,axis_angle_deg,cone_half_angle_deg,min_mismatch_rad_per_um"
    )?;
    for r in rows {
        match &r.emission {
            Some(e) => writeln!(
                w,
                "{},{:?},{},{},{}",
                r.temperature_c,
                e.regime,
                e.axis_angle_rad.to_degrees(),
                e.cone_half_angle_rad.to_degrees(),
                r.min_mismatch
            )?,
            None => writeln!(w, "{},NoSolution,,,{}", r.temperature_c, r.min_mismatch)?,
        }
    }
    Ok(())
}
