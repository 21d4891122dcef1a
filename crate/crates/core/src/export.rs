//! CSV writers for trajectories, observables and profile snapshots.

use std::io::Write;

use crate::asymptotics::SimilaritySnapshot;
use crate::error::Result;
use crate::integrator::Trajectory;
use crate::model::{observables, ModelParams, TruncatedState};

/// Header `T, rho, tau, c_1..c_N, overflow_count, overflow_mass`.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &Trajectory, n_max: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["T".to_string(), "rho".into(), "tau".into()];
    header.extend((1..=n_max).map(|j| format!("c_{j}")));
    header.extend(["overflow_count".to_string(), "overflow_mass".into()]);
    w.write_record(&header)?;
    for k in 0..trajectory.len() {
        let mut row = vec![
            trajectory.times[k].to_string(),
            trajectory.rho[k].to_string(),
            trajectory.tau[k].to_string(),
        ];
        row.extend(trajectory.states[k].iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Header `T, mass, number, z, v, w, tail_rate` from a truncated trajectory.
pub fn write_observables_csv<W: Write>(out: W, params: &ModelParams, trajectory: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T", "mass", "number", "z", "v", "w", "tail_rate"])?;
    for (t, s) in trajectory.times.iter().zip(&trajectory.states) {
        let state = TruncatedState::from_vector(*t, s)?;
        let o = observables(params, &state);
        w.write_record(
            [*t, o.mass, o.number, o.z, o.v, o.w, o.tail_rate].iter().map(f64::to_string),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Header `j, eta, C_j, scaled, psi`.
pub fn write_snapshot_csv<W: Write>(out: W, snapshot: &SimilaritySnapshot) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["j", "eta", "C_j", "scaled", "psi"])?;
    for p in &snapshot.points {
        w.write_record([
            p.j.to_string(),
            p.eta.to_string(),
            p.concentration.to_string(),
            p.scaled.to_string(),
            p.psi.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::StepStats;
    use crate::rational::int;

    #[test]
    fn trajectory_layout() {
        let traj = Trajectory {
            times: vec![0.0, 1.5],
            states: vec![vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![0.5, 0.25, 0.0, 0.0, 0.0, 0.0]],
            rho: vec![0.0, 0.4],
            tau: vec![0.0, 0.0],
            tau_origin: 1.0,
            stats: StepStats::default(),
        };
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, 4).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "T,rho,tau,c_1,c_2,c_3,c_4,overflow_count,overflow_mass"
        );
        assert_eq!(lines.nth(1).unwrap(), "1.5,0.4,0,0.5,0.25,0,0,0,0");

        let params = ModelParams::scaled(2, int(1)).unwrap();
        let mut buf = Vec::new();
        write_observables_csv(&mut buf, &params, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "0,0,0,0,1,1,0");
    }
}
