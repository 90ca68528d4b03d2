use std::fmt;

/// How a BSS obtained its current transmission opportunity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JoinKind {
    Full,
    /// Spatial-reuse TXOP running under the TXOP of `holder`.
    SrLimited {
        holder: usize,
    },
    ConPaLimited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub bss: usize,
    pub tx_dbm: f64,
    pub kind: JoinKind,
}

/// Outcome of a channel-access attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JoinDecision {
    Blocked,
    Full { tx_dbm: f64 },
    SrLimited { tx_dbm: f64, holder: usize },
    ConPaLimited { tx_dbm: f64 },
}

impl JoinDecision {
    pub fn tx_dbm(&self) -> Option<f64> {
        match *self {
            JoinDecision::Blocked => None,
            JoinDecision::Full { tx_dbm }
            | JoinDecision::SrLimited { tx_dbm, .. }
            | JoinDecision::ConPaLimited { tx_dbm } => Some(tx_dbm),
        }
    }

    pub fn into_entry(self, bss: usize) -> Option<Entry> {
        let (tx_dbm, kind) = match self {
            JoinDecision::Blocked => return None,
            JoinDecision::Full { tx_dbm } => (tx_dbm, JoinKind::Full),
            JoinDecision::SrLimited { tx_dbm, holder } => (tx_dbm, JoinKind::SrLimited { holder }),
            JoinDecision::ConPaLimited { tx_dbm } => (tx_dbm, JoinKind::ConPaLimited),
        };
        Some(Entry { bss, tx_dbm, kind })
    }
}

/// Ongoing transmissions, ordered by channel-access time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Activity {
    entries: Vec<Entry>,
}

impl Activity {
    pub fn empty() -> Self {
        Activity::default()
    }

    pub fn from_entries(entries: Vec<Entry>) -> Self {
        Activity { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, bss: usize) -> bool {
        self.entries.iter().any(|e| e.bss == bss)
    }

    pub fn entry(&self, bss: usize) -> Option<&Entry> {
        self.entries.iter().find(|e| e.bss == bss)
    }

    /// Earliest full-power transmission still on the air.
    pub fn first_full(&self) -> Option<usize> {
        self.entries.iter().find(|e| e.kind == JoinKind::Full).map(|e| e.bss)
    }

    /// Whether `bss` leaves the channel on its own clock. SR followers end
    /// together with their holder instead.
    pub fn has_own_clock(&self, bss: usize) -> bool {
        matches!(self.entry(bss), Some(e) if !matches!(e.kind, JoinKind::SrLimited { .. }))
    }

    pub fn with(&self, entry: Entry) -> Activity {
        debug_assert!(!self.contains(entry.bss));
        let mut entries = self.entries.clone();
        entries.push(entry);
        Activity { entries }
    }

    /// Removes `bss` together with every SR follower riding on its TXOP.
    pub fn without(&self, bss: usize) -> Activity {
        let entries = self
            .entries
            .iter()
            .filter(|e| e.bss != bss && e.kind != JoinKind::SrLimited { holder: bss })
            .copied()
            .collect();
        Activity { entries }
    }

    pub fn key(&self, order_sensitive: bool) -> StateKey {
        let mut items: Vec<(usize, KeyKind)> = self
            .entries
            .iter()
            .map(|e| {
                let kind = match e.kind {
                    JoinKind::Full => KeyKind::Full,
                    JoinKind::SrLimited { holder } => KeyKind::Sr(holder),
                    JoinKind::ConPaLimited => KeyKind::ConPa,
                };
                (e.bss, kind)
            })
            .collect();
        if !order_sensitive {
            items.sort();
        }
        StateKey(items)
    }

    /// Human-readable label in join order: `∅`, `A`, `AB♠`, `BA♦`.
    /// ♠ marks an SR power-limited TXOP, ♦ a ConPA transmission below `p_max_dbm`.
    pub fn label(&self, p_max_dbm: f64) -> String {
        if self.entries.is_empty() {
            return "∅".to_string();
        }
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&bss_label(e.bss));
            match e.kind {
                JoinKind::SrLimited { .. } => s.push('♠'),
                JoinKind::ConPaLimited if e.tx_dbm < p_max_dbm => s.push('♦'),
                _ => {}
            }
        }
        s
    }
}

/// Letter name for a BSS index (A, B, ... Z, then B27, B28, ...).
pub fn bss_label(bss: usize) -> String {
    if bss < 26 {
        ((b'A' + bss as u8) as char).to_string()
    } else {
        format!("B{}", bss + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KeyKind {
    Full,
    Sr(usize),
    ConPa,
}

/// Canonical identity of a chain state. Transmit powers are a function of
/// the key, so they are not part of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateKey(pub Vec<(usize, KeyKind)>);

impl StateKey {
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&(b, _)| b)
    }

    /// Applies a BSS relabeling `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize], order_sensitive: bool) -> StateKey {
        let mut items: Vec<_> = self
            .0
            .iter()
            .map(|&(b, k)| {
                let k = match k {
                    KeyKind::Sr(h) => KeyKind::Sr(perm[h]),
                    other => other,
                };
                (perm[b], k)
            })
            .collect();
        if !order_sensitive {
            items.sort();
        }
        StateKey(items)
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        for (b, k) in &self.0 {
            write!(f, "{}", bss_label(*b))?;
            if let KeyKind::Sr(_) = k {
                write!(f, "♠")?;
            }
        }
        Ok(())
    }
}
