use std::io::Write;

use super::{QaoaError, QaoaState};

/// Largest state written by [`QaoaState::write_csv`].
pub const DUMP_MAX_QUBITS: usize = 10;

impl QaoaState {
    /// Writes `index,re,im,energy` rows, one per basis state.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), QaoaError> {
        let k = self.k();
        if k > DUMP_MAX_QUBITS {
            return Err(QaoaError::DumpTooLarge {
                k,
                max: DUMP_MAX_QUBITS,
            });
        }
        let dump_err = |e: csv::Error| QaoaError::Dump(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["index", "re", "im", "energy"])
            .map_err(dump_err)?;
        for (b, (a, e)) in self.amplitudes().iter().zip(self.energies()).enumerate() {
            w.serialize((b, a.re, a.im, e)).map_err(dump_err)?;
        }
        w.flush().map_err(|e| QaoaError::Dump(e.to_string()))
    }
}
