//! Frame codec for the on-off keyed covert link.
//!
//! A frame is 48 bits on the air: an 8-bit `0xAA` preamble, a 32-bit payload
//! and a CRC-8 over the four payload bytes. Everything is MSB-first, so the
//! preamble reads `10101010` — the alternating pattern the receiver locks on
//! to and uses for threshold estimation.

use thiserror::Error;

/// Preamble byte opening every frame; `10101010` on the air.
pub const PREAMBLE: u8 = 0xAA;
/// Protocol CRC: polynomial 0x07 (x^8 + x^2 + x + 1), init 0x00,
/// no reflection, no final XOR.
pub const CRC8_POLY: u8 = 0x07;

pub const PREAMBLE_BITS: usize = 8;
pub const PAYLOAD_BITS: usize = 32;
pub const CRC_BITS: usize = 8;
pub const FRAME_BITS: usize = PREAMBLE_BITS + PAYLOAD_BITS + CRC_BITS;

/// A single application payload: exactly 32 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Packet {
    pub payload: u32,
}

impl Packet {
    pub fn new(payload: u32) -> Self {
        Self { payload }
    }

    /// Payload as big-endian bytes, the order they travel on the air.
    pub fn payload_bytes(&self) -> [u8; 4] {
        self.payload.to_be_bytes()
    }
}

/// One on-air frame: 48 bit symbols, each 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    bits: [u8; FRAME_BITS],
}

impl Frame {
    pub fn bits(&self) -> &[u8; FRAME_BITS] {
        &self.bits
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DecodeError {
    /// First 8 bits are not `10101010`.
    #[error("bad preamble")]
    BadPreamble,
    /// Received CRC differs from the CRC recomputed over the payload.
    #[error("crc mismatch: received {received:#04x}, computed {computed:#04x}")]
    CrcMismatch { received: u8, computed: u8 },
    /// Fewer than 48 bits available.
    #[error("truncated frame: got {got} of {FRAME_BITS} bits")]
    Truncated { got: usize },
}

const fn build_crc8_table() -> [u8; 256] {
    let mut table = [0u8; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = i as u8;
        let mut bit = 0;
        while bit < 8 {
            if crc & 0x80 != 0 {
                crc = (crc << 1) ^ CRC8_POLY;
            } else {
                crc <<= 1;
            }
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
}

static CRC8_TABLE: [u8; 256] = build_crc8_table();

/// CRC-8 checksum over `data` (poly 0x07, init 0x00, unreflected).
pub fn crc8(data: &[u8]) -> u8 {
    let mut crc = 0u8;
    for &byte in data {
        crc = CRC8_TABLE[(crc ^ byte) as usize];
    }
    crc
}

fn push_byte_bits(bits: &mut Vec<u8>, byte: u8) {
    for i in (0..8).rev() {
        bits.push((byte >> i) & 1);
    }
}

fn bits_to_byte(bits: &[u8]) -> u8 {
    bits.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1))
}

/// Encode a packet into its 48-bit frame: preamble ++ payload ++ CRC,
/// all MSB-first.
pub fn encode_packet(packet: Packet) -> Frame {
    let mut bits = Vec::with_capacity(FRAME_BITS);
    push_byte_bits(&mut bits, PREAMBLE);
    for byte in packet.payload_bytes() {
        push_byte_bits(&mut bits, byte);
    }
    push_byte_bits(&mut bits, crc8(&packet.payload_bytes()));
    let bits: [u8; FRAME_BITS] = bits.try_into().expect("frame is 48 bits");
    Frame { bits }
}

/// Decode 48 received bits back into a packet.
///
/// Checks run in order: length, preamble, CRC. Extra bits beyond the first
/// 48 are ignored so the decoder can be pointed at a stream position.
pub fn decode_frame(bits: &[u8]) -> Result<Packet, DecodeError> {
    if bits.len() < FRAME_BITS {
        return Err(DecodeError::Truncated { got: bits.len() });
    }
    let bits = &bits[..FRAME_BITS];
    if bits_to_byte(&bits[..PREAMBLE_BITS]) != PREAMBLE {
        return Err(DecodeError::BadPreamble);
    }
    let mut payload_bytes = [0u8; 4];
    for (i, chunk) in bits[PREAMBLE_BITS..PREAMBLE_BITS + PAYLOAD_BITS]
        .chunks(8)
        .enumerate()
    {
        payload_bytes[i] = bits_to_byte(chunk);
    }
    let received = bits_to_byte(&bits[PREAMBLE_BITS + PAYLOAD_BITS..]);
    let computed = crc8(&payload_bytes);
    if received != computed {
        return Err(DecodeError::CrcMismatch { received, computed });
    }
    Ok(Packet::new(u32::from_be_bytes(payload_bytes)))
}

/// Split a message into consecutive 4-byte payloads, zero-padding the tail.
///
/// The original length is not carried in-band; the caller conveys it out of
/// band if padding must be stripped after reassembly.
pub fn segment_message(data: &[u8]) -> Vec<Packet> {
    data.chunks(4)
        .map(|chunk| {
            let mut bytes = [0u8; 4];
            bytes[..chunk.len()].copy_from_slice(chunk);
            Packet::new(u32::from_be_bytes(bytes))
        })
        .collect()
}
