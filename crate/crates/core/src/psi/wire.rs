//! Length-prefixed JSON frames: a 4-byte big-endian length followed by
//! `{"session_id": "<32 hex>", "kind": ..., "body": ...}`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ProtocolError;
use crate::bfv::codec::Envelope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SessionId(pub u128);

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl Serialize for SessionId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SessionId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 32 {
            return Err(serde::de::Error::custom("session id must be 32 hex digits"));
        }
        u128::from_str_radix(&s, 16)
            .map(SessionId)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    PubKey,
    Query,
    Response,
    Result,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MessageKind::PubKey => "pub_key",
            MessageKind::Query => "query",
            MessageKind::Response => "response",
            MessageKind::Result => "result",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultBody {
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "snake_case")]
pub enum Payload {
    PubKey(Envelope),
    Query(Envelope),
    Response(Envelope),
    Result(ResultBody),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMessage {
    pub session_id: SessionId,
    #[serde(flatten)]
    pub payload: Payload,
}

impl WireMessage {
    pub fn kind(&self) -> MessageKind {
        match self.payload {
            Payload::PubKey(_) => MessageKind::PubKey,
            Payload::Query(_) => MessageKind::Query,
            Payload::Response(_) => MessageKind::Response,
            Payload::Result(_) => MessageKind::Result,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let json = serde_json::to_vec(self).expect("wire messages always serialize");
        let len = u32::try_from(json.len()).expect("frame under 4 GiB");
        let mut out = Vec::with_capacity(4 + json.len());
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&json);
        out
    }

    pub fn decode(frame: &[u8]) -> Result<Self, ProtocolError> {
        let (len, body) = frame
            .split_first_chunk::<4>()
            .ok_or_else(|| ProtocolError::Frame("shorter than the length prefix".into()))?;
        let len = u32::from_be_bytes(*len) as usize;
        if len != body.len() {
            return Err(ProtocolError::Frame(format!(
                "length prefix says {len} bytes, frame carries {}",
                body.len()
            )));
        }
        serde_json::from_slice(body).map_err(|e| ProtocolError::Frame(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_layout() {
        let msg = WireMessage {
            session_id: SessionId(0xabc),
            payload: Payload::Result(ResultBody { equal: true }),
        };
        let bytes = msg.encode();
        let json = br#"{"session_id":"00000000000000000000000000000abc","kind":"result","body":{"equal":true}}"#;
        assert_eq!(&bytes[..4], &(json.len() as u32).to_be_bytes());
        assert_eq!(&bytes[4..], &json[..]);
        assert_eq!(WireMessage::decode(&bytes).unwrap(), msg);
    }

    #[test]
    fn malformed_frames() {
        let msg = WireMessage {
            session_id: SessionId(1),
            payload: Payload::Result(ResultBody { equal: false }),
        };
        let bytes = msg.encode();
        assert!(WireMessage::decode(&bytes[..3]).is_err());
        assert!(WireMessage::decode(&bytes[..bytes.len() - 1]).is_err());
        let mut garbled = bytes.clone();
        garbled[10] = b'!';
        assert!(WireMessage::decode(&garbled).is_err());
        let mut bad_id = b"\0\0\0\0".to_vec();
        let json = br#"{"session_id":"xyz","kind":"result","body":{"equal":true}}"#;
        bad_id[..4].copy_from_slice(&(json.len() as u32).to_be_bytes());
        bad_id.extend_from_slice(json);
        assert!(WireMessage::decode(&bad_id).is_err());
    }
}
