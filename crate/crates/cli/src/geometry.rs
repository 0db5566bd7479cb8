//! `asymm geometry`: distance curves along `p + q = 1`.

use std::io::Write;

use asymm_core::geometry::{constraint_curve, CurveSample};

use crate::format::csv_number;
use crate::{emit, CliError, CliResult, GeometryArgs};

/// `0, step, 2·step, ..., 1`; the step has to divide 1.
pub fn unit_grid(step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(CliError::Input(format!("grid step must lie in (0, 1], got {step}")));
    }
    let count = (1.0 / step).round();
    if (count * step - 1.0).abs() > 1e-9 || count > 1e7 {
        return Err(CliError::Input(format!("grid step {step} does not divide [0, 1]")));
    }
    let count = count as u64;
    Ok((0..=count).map(|k| k as f64 / count as f64).collect())
}

pub fn to_csv(samples: &[CurveSample]) -> String {
    let mut out = String::from("pc,ed,frd,hd\n");
    for s in samples {
        out += &format!(
            "{},{},{},{}\n",
            csv_number(s.pc),
            csv_number(s.ed),
            csv_number(s.frd),
            csv_number(s.hd)
        );
    }
    out
}

pub fn run(args: &GeometryArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let grid = unit_grid(args.grid_step)?;
    let samples = constraint_curve(&grid)?;
    emit(&to_csv(&samples), args.out.as_ref(), stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = unit_grid(0.25).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(unit_grid(0.001).unwrap().len(), 1001);
        assert_eq!(unit_grid(0.001).unwrap()[6], 0.006);
        assert!(unit_grid(0.3).is_err());
        assert!(unit_grid(0.0).is_err());
        assert!(unit_grid(-0.1).is_err());
        assert!(unit_grid(f64::NAN).is_err());
    }
}
