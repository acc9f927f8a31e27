//! Design the band-pass filters, check their poles, and compare them with the
//! published coefficient sets.
//!
//! ```text
//! cargo run --example filter_design
//! ```

use vls_vitals::dsp::{design_bandpass, BandSpec, ChebyshevDesign, EdgeConvention, FilterCoefficients, FilterPreset};

fn describe(filter: &FilterCoefficients, probes_bpm: &[f64]) {
    let s = filter.stability();
    println!(
        "{}: order {}, {} (max |pole| {:.6}, margin {:.2e})",
        filter.label(),
        filter.feedback().len() - 1,
        s.verdict,
        s.max_pole_modulus,
        s.margin
    );
    for &bpm in probes_bpm {
        let db = 20.0 * filter.frequency_response(bpm / 60.0, 100.0).norm().log10();
        println!("  {bpm:>6.1} BPM  {db:>8.2} dB");
    }
}

fn main() -> vls_vitals::Result<()> {
    let fs = 100.0;
    let design = ChebyshevDesign::default();
    for band in [BandSpec::breathing(), BandSpec::heart()] {
        println!("{} band {}-{} BPM", band.kind, band.low_bpm, band.high_bpm);
        let filter = design_bandpass(&design, band.low_hz(), band.high_hz(), fs)?;
        describe(
            &filter,
            &[
                5.0,
                band.low_bpm,
                (band.low_bpm * band.high_bpm).sqrt(),
                band.high_bpm,
                300.0,
            ],
        );
    }

    // the published heart filter is a 4th-order, 60 dB design with stop-band edges
    let heart = BandSpec::heart();
    let stopband = ChebyshevDesign {
        order: 4,
        stopband_db: 60.0,
        edges: EdgeConvention::Stopband,
    };
    let redesigned = design_bandpass(&stopband, heart.low_hz(), heart.high_hz(), fs)?;
    println!("\nredesigned heart feedback: {:.4?}", redesigned.feedback());
    println!(
        "published heart feedback:  {:?}",
        FilterPreset::PaperHeart.coefficients(true)?.feedback()
    );

    println!();
    for preset in [FilterPreset::PaperBreathing, FilterPreset::PaperHeart] {
        describe(&preset.coefficients(true)?, &[15.0, 72.0]);
        if let Err(e) = preset.coefficients(false) {
            println!("  without override: {e}");
        }
    }
    Ok(())
}
