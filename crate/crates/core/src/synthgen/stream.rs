use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::RawRecord;

/// Seeded draws that do not depend on the platform's pointer width: every
/// bounded draw goes through `u64`.
pub struct Draw(ChaCha8Rng);

impl Draw {
    pub fn new(seed: u64) -> Self {
        Draw(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.0.gen::<f64>() < p
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.below(items.len())]
    }

    /// A uniformly chosen element other than `not`, if one exists.
    pub fn pick_other<T: Copy + PartialEq>(&mut self, items: &[T], not: T) -> Option<T> {
        match items.iter().filter(|&&x| x != not).count() {
            0 => None,
            _ => loop {
                let x = self.pick(items);
                if x != not {
                    return Some(x);
                }
            },
        }
    }

    /// Fisher-Yates.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserId(pub usize);

/// What a synthetic post does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Act {
    Plain,
    Retweet(UserId),
    /// Retweet whose body also mentions a second user.
    RetweetMention(UserId, UserId),
    Mention(UserId),
    Via(UserId),
}

impl Act {
    fn targets(&self) -> Vec<UserId> {
        match *self {
            Act::Plain => vec![],
            Act::Retweet(t) | Act::Mention(t) | Act::Via(t) => vec![t],
            Act::RetweetMention(a, b) => vec![a, b],
        }
    }
}

const PHRASES: &[&str] = &[
    "we are the 99 percent",
    "banks got bailed out, we got sold out",
    "occupy everything",
    "the system is broken",
    "solidarity from the square",
    "this is what democracy looks like",
    "they cannot evict an idea",
];

const TAGS: &[&str] = &[
    "#wearethe99percent",
    "#99percent",
    "#WeAreThe99Percent",
    "#ows #99percent",
];

struct Post {
    offset_secs: i64,
    seq: usize,
    author: UserId,
    text: String,
}

/// Accumulates synthetic posts and renders them as records.
pub struct Stream {
    pub draw: Draw,
    origin: DateTime<Utc>,
    period: Duration,
    names: Vec<String>,
    posts: Vec<Post>,
    events: usize,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            draw: Draw::new(seed),
            origin: Utc.with_ymd_and_hms(2011, 9, 17, 0, 0, 0).unwrap(),
            period: Duration::days(3),
            names: Vec::new(),
            posts: Vec::new(),
            events: 0,
        }
    }

    pub fn new_user(&mut self, prefix: &str) -> UserId {
        let id = UserId(self.names.len());
        self.names.push(format!("{prefix}{}", id.0));
        id
    }

    pub fn new_users(&mut self, prefix: &str, count: usize) -> Vec<UserId> {
        (0..count).map(|_| self.new_user(prefix)).collect()
    }

    pub fn user_count(&self) -> usize {
        self.names.len()
    }

    /// Interactions emitted so far.
    pub fn events(&self) -> usize {
        self.events
    }

    /// Posts `act` by `author` at a random instant of 1-based `period`.
    pub fn post(&mut self, period: usize, author: UserId, act: Act) {
        let targets = act.targets();
        assert!(
            targets.iter().all(|&t| t != author) && (targets.len() < 2 || targets[0] != targets[1]),
            "invalid synthetic act {act:?} by {author:?}"
        );
        let span = if self.posts.is_empty() {
            86_400 // pins the dataset origin to the first day
        } else {
            self.period.num_seconds() as usize
        };
        let offset_secs =
            self.period.num_seconds() * (period as i64 - 1) + self.draw.below(span) as i64;
        let phrase = self.draw.pick(PHRASES);
        let tag = self.draw.pick(TAGS);
        let name = |u: UserId| self.names[u.0].as_str();
        let text = match act {
            Act::Plain => format!("{phrase} {tag}"),
            Act::Retweet(t) => format!("RT @{}: {phrase} {tag}", name(t)),
            Act::RetweetMention(t, m) => format!("RT @{}: {phrase} @{} {tag}", name(t), name(m)),
            Act::Mention(t) => format!("@{} {phrase} {tag}", name(t)),
            Act::Via(t) => format!("{phrase} {tag} via @{}", name(t)),
        };
        self.events += targets.len();
        self.posts.push(Post {
            offset_secs,
            seq: self.posts.len(),
            author,
            text,
        });
    }

    /// Records in time order, ids assigned in that order.
    pub fn finish(mut self) -> Vec<RawRecord> {
        self.posts.sort_by_key(|p| (p.offset_secs, p.seq));
        self.posts
            .into_iter()
            .enumerate()
            .map(|(i, p)| RawRecord {
                id: format!("{}", 100_000_000 + i),
                author: self.names[p.author.0].clone(),
                timestamp: self.origin + Duration::seconds(p.offset_secs),
                text: p.text,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::extract_interactions;

    #[test]
    fn acts_render_to_matching_interactions() {
        let mut s = Stream::new(1);
        let [a, b, c] = [s.new_user("u"), s.new_user("u"), s.new_user("u")];
        s.post(1, a, Act::RetweetMention(b, c));
        s.post(1, a, Act::Via(b));
        s.post(2, b, Act::Mention(a));
        s.post(2, c, Act::Plain);
        let events = s.events();
        let records = s.finish();
        let extracted: usize = records.iter().map(|r| extract_interactions(r).len()).sum();
        assert_eq!(events, 4);
        assert_eq!(extracted, 4);
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut d = Draw::new(9);
        let mut v: Vec<usize> = (0..50).collect();
        d.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }

    #[test]
    #[should_panic(expected = "invalid synthetic act")]
    fn self_targets_are_rejected() {
        let mut s = Stream::new(1);
        let a = s.new_user("u");
        s.post(1, a, Act::Mention(a));
    }
}
