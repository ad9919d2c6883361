//! Kernel samples and their CSV representation for regression fixtures.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Vc,
    Vel,
    Wc,
    Wm,
    Q,
    CoulombForce,
    VMuNu,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Vc => "Vc",
            KernelKind::Vel => "Vel",
            KernelKind::Wc => "Wc",
            KernelKind::Wm => "Wm",
            KernelKind::Q => "Q",
            KernelKind::CoulombForce => "coulomb_force",
            KernelKind::VMuNu => "v_munu",
        }
    }
}

/// One evaluated kernel value with its arguments.
#[derive(Clone, Debug, PartialEq)]
pub struct PairKernelSample {
    pub kind: KernelKind,
    pub args: Vec<f64>,
    pub value: Complex64,
}

impl PairKernelSample {
    /// Writes samples as CSV rows `kind,arg0,...,re,im`.
    pub fn write_csv<W: std::io::Write>(samples: &[PairKernelSample], out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        for s in samples {
            let mut row = vec![s.kind.name().to_string()];
            row.extend(s.args.iter().map(|a| format!("{a:.17e}")));
            row.push(format!("{:.17e}", s.value.re));
            row.push(format!("{:.17e}", s.value.im));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
