use std::io::{self, Write};

use super::policy::{consensus_timestamp, ConsensusPolicy};
use super::sat::SpectrumAccessTransaction;
use super::UserId;

/// Writes one line per transaction: id, origin, generation slot, the
/// verification pairs in user order, and the consensus timestamp computed
/// from `observer`'s point of view.
///
/// The format is stable so dumps from independent replicas can be diffed
/// byte-for-byte to localize disagreement.
pub fn write_ledger_dump<W: Write>(
    out: &mut W,
    sats: &[SpectrumAccessTransaction],
    observer: UserId,
    policy: &ConsensusPolicy,
    n: u32,
) -> io::Result<()> {
    for sat in sats {
        let t_hat = consensus_timestamp(sat, observer, policy, n)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        let pairs: Vec<String> = sat
            .verifications()
            .iter()
            .map(|(user, slot)| format!("{}:{}", user.0, slot.0))
            .collect();
        writeln!(
            out,
            "sat_id={} origin={} generated_at={} verifications={} t_hat={}",
            sat.sat_id(),
            sat.origin().0,
            sat.generated_at().0,
            pairs.join(","),
            t_hat
        )?;
    }
    Ok(())
}
