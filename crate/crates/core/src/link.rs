//! End-to-end sample transport: modulate, normalize, add noise, undo the
//! transmit gain, zero-pad and decode.

use crate::channel::{awgn_in_place, normalize_power_in_place, noise_variance, ChannelConfig};
use crate::codec::{decode_latents, demodulate, modulate, Codebook, Encoded, Frame, Latents, Matrix, UniformCodec};
use crate::graph::{OarGraph, Vocabulary};
use crate::scheduler::TransmissionMask;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelUse {
    pub symbols: usize,
    /// Gain applied by power normalization; the receiver divides it out.
    pub gain: f64,
    pub noise_variance: f64,
}

/// Sends the transmitted blocks of `frame` through the channel in place.
/// The transmit gain is side information known to the receiver.
pub fn apply_channel(frame: &mut Frame, cfg: &ChannelConfig) -> ChannelUse {
    let mut tx = frame.serialize();
    let used = transmit(&mut tx, cfg);
    frame.deserialize(&tx);
    used
}

/// Normalizes `tx` to unit mean power, adds noise and removes the gain.
pub fn transmit(tx: &mut [f64], cfg: &ChannelConfig) -> ChannelUse {
    let gain = normalize_power_in_place(tx);
    awgn_in_place(tx, cfg);
    tx.iter_mut().for_each(|v| *v /= gain);
    ChannelUse { symbols: tx.len(), gain, noise_variance: noise_variance(cfg.snr_db, cfg.noise_mode, tx.len()) }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkOutput {
    pub decoded: OarGraph,
    pub received: Latents,
    pub channel: ChannelUse,
}

/// Masked, prioritized transport of one encoded sample.
pub fn semantic_link(
    encoded: &Encoded,
    mask: TransmissionMask,
    cb: &Codebook,
    vocab: &Vocabulary,
    channel: &ChannelConfig,
    threshold: f64,
) -> LinkOutput {
    let mut frame = modulate(&encoded.latents, cb, [true, mask.attr, mask.rel]);
    let used = apply_channel(&mut frame, channel);
    let received = demodulate(&frame, cb);
    let decoded = decode_latents(&received, cb, vocab, threshold);
    LinkOutput { decoded, received, channel: used }
}

/// Equal-priority transport of all three streams through `codec`.
pub fn uniform_link(
    encoded: &Encoded,
    codec: &UniformCodec,
    cb: &Codebook,
    vocab: &Vocabulary,
    channel: &ChannelConfig,
    threshold: f64,
) -> LinkOutput {
    let x = codec.compress(&encoded.latents);
    let (rows, cols) = x.shape();
    let mut tx = x.into_vec();
    let used = transmit(&mut tx, channel);
    let received = codec.decompress(&Matrix::from_vec(rows, cols, tx));
    let decoded = decode_latents(&received, cb, vocab, threshold);
    LinkOutput { decoded, received, channel: used }
}
