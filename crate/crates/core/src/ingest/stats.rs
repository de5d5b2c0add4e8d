use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{extract_interactions, InteractionKind, RawRecord};

/// Dataset-level counts for one frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total_tweets: usize,
    /// Records carrying a retweet.
    pub retweets: usize,
    /// Records carrying at least one mention.
    pub tweets_with_mentions: usize,
    /// Authors and interaction targets.
    pub unique_users: usize,
}

impl DatasetStats {
    pub fn rows(&self) -> [(&'static str, usize); 4] {
        [
            ("total_tweets", self.total_tweets),
            ("retweets", self.retweets),
            ("tweets_with_mentions", self.tweets_with_mentions),
            ("unique_users", self.unique_users),
        ]
    }
}

pub fn descriptive_stats(records: &[RawRecord]) -> DatasetStats {
    let mut users = BTreeSet::new();
    let mut stats = DatasetStats {
        total_tweets: records.len(),
        ..Default::default()
    };
    for record in records {
        users.insert(record.author.as_str().to_owned());
        let interactions = extract_interactions(record);
        if interactions
            .iter()
            .any(|i| i.kind == InteractionKind::Retweet)
        {
            stats.retweets += 1;
        }
        if interactions
            .iter()
            .any(|i| i.kind == InteractionKind::Mention)
        {
            stats.tweets_with_mentions += 1;
        }
        users.extend(interactions.into_iter().map(|i| i.target));
    }
    stats.unique_users = users.len();
    stats
}
