use std::io::{self, Write};

use super::{HelicityAmplitudes, ModeGrid, SpectralAmplitude};

pub const SPECTRUM_HEADER: &str = "k_rho,k_z,omega,re_plus,im_plus,re_minus,im_minus,re_axial,im_axial,re_f_plus,im_f_plus,re_f_minus,im_f_minus";

/// Writes one row per mode node, `k_ρ`-major, with the sector amplitudes at
/// `φ = 0` and the photon amplitudes.
pub fn write_spectrum_csv<W: Write>(
    out: &mut W,
    spec: &SpectralAmplitude,
    h: &HelicityAmplitudes,
    modes: &ModeGrid,
) -> io::Result<()> {
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for i in 0..modes.len() {
        let n = modes.node(i);
        let vals = [
            n.k_rho,
            n.k_z,
            n.omega,
            spec.plus[i].re,
            spec.plus[i].im,
            spec.minus[i].re,
            spec.minus[i].im,
            spec.axial[i].re,
            spec.axial[i].im,
            h.plus[i].re,
            h.plus[i].im,
            h.minus[i].re,
            h.minus[i].im,
        ];
        let row: Vec<String> = vals.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
