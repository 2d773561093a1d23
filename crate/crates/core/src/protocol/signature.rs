use sha2::{Digest, Sha256};

use super::UserId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey(Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey(Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature(Vec<u8>);

impl Signature {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

/// Signing backend for spectrum access transactions.
///
/// The protocol only relies on three properties: every user can derive its
/// own keypair, anyone can check a transaction against the generator's
/// public key, and a transaction altered after signing fails that check.
pub trait SignatureScheme {
    fn keypair(&self, user: UserId) -> (PublicKey, SecretKey);
    fn sign(&self, key: &SecretKey, message: &[u8]) -> Signature;
    fn verify(&self, key: &PublicKey, message: &[u8], signature: &Signature) -> bool;
}

/// Deterministic keyed-hash stand-in for a real signature scheme.
///
/// Each user's secret is a hash of a master seed and the user id, the
/// "public" key is the same secret (every simulated user is honest about
/// key distribution), and a signature is the hash of secret plus message.
/// This keeps runs reproducible and tamper checks meaningful without
/// pulling in asymmetric cryptography the simulations do not need.
#[derive(Debug, Clone)]
pub struct KeyedHashScheme {
    master: [u8; 32],
}

impl KeyedHashScheme {
    pub fn new(master_seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"sat-keyed-hash-master");
        h.update(master_seed.to_be_bytes());
        Self { master: h.finalize().into() }
    }
}

impl SignatureScheme for KeyedHashScheme {
    fn keypair(&self, user: UserId) -> (PublicKey, SecretKey) {
        let mut h = Sha256::new();
        h.update(self.master);
        h.update(b"user");
        h.update(user.0.to_be_bytes());
        let secret = h.finalize().to_vec();
        (PublicKey(secret.clone()), SecretKey(secret))
    }

    fn sign(&self, key: &SecretKey, message: &[u8]) -> Signature {
        let mut h = Sha256::new();
        h.update(&key.0);
        h.update(message);
        Signature(h.finalize().to_vec())
    }

    fn verify(&self, key: &PublicKey, message: &[u8], signature: &Signature) -> bool {
        let mut h = Sha256::new();
        h.update(&key.0);
        h.update(message);
        h.finalize().as_slice() == signature.0
    }
}
