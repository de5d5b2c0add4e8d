//! The three built-in regimes.
//!
//! - `activist_core`: a fixed core authors every period; newcomers retweet
//!   the core member owning their neighbourhood and, increasingly over
//!   time, mention neighbours attached to the same core member.
//! - `opportunist`: sparse random chatter until the takeover period, then a
//!   fresh activist set becomes the hub layer. Short-lived rival sets grab
//!   most of the attention for single periods afterwards.
//! - `waves`: each period a fresh group splits into speakers and listeners
//!   who retweet speakers of their own group; groups live two periods and
//!   rarely talk across groups.

use super::stream::{Act, Stream, UserId};
use super::{GenError, GeneratorSpec, Regime};

const HUB_MENTIONS: usize = 3;
const VIA_SHARE: f64 = 0.15;
const PLAIN_SHARE: f64 = 0.25;
const SPEAKER_SHARE: f64 = 1.0 / 3.0;

fn returners(stream: &mut Stream, population: &[UserId], rate: f64) -> Vec<UserId> {
    population
        .iter()
        .copied()
        .filter(|_| stream.draw.chance(rate))
        .collect()
}

/// Every hub mentions a few distinct fellow hubs and posts once unprompted.
fn hub_chatter(stream: &mut Stream, period: usize, hubs: &[UserId]) {
    for &hub in hubs {
        let mut others: Vec<UserId> = hubs.iter().copied().filter(|&h| h != hub).collect();
        stream.draw.shuffle(&mut others);
        for &target in others.iter().take(HUB_MENTIONS) {
            stream.post(period, hub, Act::Mention(target));
        }
        stream.post(period, hub, Act::Plain);
    }
}

fn chatter(stream: &mut Stream, period: usize, author: UserId, active: &[UserId]) {
    if let Some(target) = stream.draw.pick_other(active, author) {
        let act = if stream.draw.chance(VIA_SHARE) {
            Act::Via(target)
        } else {
            Act::Mention(target)
        };
        stream.post(period, author, act);
    }
}

/// Hubs an attaching user can retweet this period: its own neighbourhood
/// hub, or with `rival_share` a hub of a rival set.
struct HubLayer<'a> {
    hubs: &'a [UserId],
    rivals: &'a [UserId],
    rival_share: f64,
}

/// One period of hub-centred activity. `community[u]` is the hub index
/// owning user `u`.
fn attach_round(
    stream: &mut Stream,
    spec: &GeneratorSpec,
    period: usize,
    active: &[UserId],
    community: &[usize],
    layer: &HubLayer<'_>,
    p_peer: f64,
) {
    let groups = layer.hubs.len() + layer.rivals.len();
    let mut attached: Vec<Vec<UserId>> = vec![Vec::new(); groups];
    for &user in active {
        if stream.draw.chance(spec.p_retweet_core) {
            let own = community[user.0] % layer.hubs.len();
            let (group, hub) = if !layer.rivals.is_empty() && stream.draw.chance(layer.rival_share)
            {
                let r = own % layer.rivals.len();
                (layer.hubs.len() + r, layer.rivals[r])
            } else {
                (own, layer.hubs[own])
            };
            let peer = if stream.draw.chance(p_peer) {
                stream.draw.pick_other(&attached[group], user)
            } else {
                None
            };
            let act = match peer {
                Some(peer) => Act::RetweetMention(hub, peer),
                None => Act::Retweet(hub),
            };
            stream.post(period, user, act);
            attached[group].push(user);
        } else {
            chatter(stream, period, user, active);
        }
        if stream.draw.chance(spec.chatter_rate) {
            chatter(stream, period, user, active);
        }
    }
}

/// Linear ramp from `peer_mention_start` to `peer_mention_max` over
/// `peer_ramp_periods`, counted from `since`.
fn peer_rate(spec: &GeneratorSpec, period: usize, since: usize) -> f64 {
    let progress = if spec.peer_ramp_periods == 0 {
        1.0
    } else {
        ((period - since) as f64 / spec.peer_ramp_periods as f64).min(1.0)
    };
    spec.peer_mention_start + (spec.peer_mention_max - spec.peer_mention_start) * progress
}

fn grow_community(stream: &mut Stream, community: &mut Vec<usize>, hubs: usize) {
    while community.len() < stream.user_count() {
        let c = stream.draw.below(hubs);
        community.push(c);
    }
}

pub struct ActivistCore;

impl Regime for ActivistCore {
    fn name(&self) -> &'static str {
        "activist_core"
    }

    fn description(&self) -> &'static str {
        "persistent activist core that bridges growing neighbourhoods from the first period"
    }

    fn simulate(&self, spec: &GeneratorSpec, stream: &mut Stream) {
        let core = stream.new_users("core", spec.core_size);
        let mut community = Vec::new();
        let mut population: Vec<UserId> = Vec::new();
        let layer = HubLayer {
            hubs: &core,
            rivals: &[],
            rival_share: 0.0,
        };
        for period in 1..=spec.periods {
            hub_chatter(stream, period, &core);
            let newcomers = stream.new_users("u", spec.incomers(period));
            grow_community(stream, &mut community, core.len());
            let mut active = newcomers.clone();
            active.extend(returners(stream, &population, spec.return_rate));
            stream.draw.shuffle(&mut active);
            attach_round(
                stream,
                spec,
                period,
                &active,
                &community,
                &layer,
                peer_rate(spec, period, 1),
            );
            population.extend(newcomers);
        }
    }
}

pub struct Opportunist;

impl Regime for Opportunist {
    fn name(&self) -> &'static str {
        "opportunist"
    }

    fn description(&self) -> &'static str {
        "dispersed chatter taken over by late-arriving activists, with short-lived rival sets"
    }

    fn validate(&self, spec: &GeneratorSpec) -> Result<(), GenError> {
        if spec.takeover_period < 2 || spec.takeover_period > spec.periods {
            return Err(GenError::InvalidSpec(format!(
                "takeover_period {} must lie in 2..={}",
                spec.takeover_period, spec.periods
            )));
        }
        Ok(())
    }

    fn simulate(&self, spec: &GeneratorSpec, stream: &mut Stream) {
        let mut population: Vec<UserId> = Vec::new();
        let mut community = Vec::new();
        let mut activists: Vec<UserId> = Vec::new();
        for period in 1..=spec.periods {
            if period == spec.takeover_period {
                activists = stream.new_users("act", spec.core_size);
            }
            let since_takeover = period.checked_sub(spec.takeover_period);
            let rivals = match since_takeover {
                Some(k) if k > 0 && spec.rival_interval > 0 && k % spec.rival_interval == 0 => {
                    stream.new_users("riv", spec.core_size)
                }
                _ => Vec::new(),
            };
            let newcomers = stream.new_users("u", spec.incomers(period));
            let mut active = newcomers.clone();
            active.extend(returners(stream, &population, spec.return_rate));
            stream.draw.shuffle(&mut active);

            if since_takeover.is_none() {
                for &user in &active {
                    if stream.draw.chance(PLAIN_SHARE) {
                        stream.post(period, user, Act::Plain);
                    } else {
                        chatter(stream, period, user, &active);
                    }
                    if stream.draw.chance(spec.chatter_rate) {
                        chatter(stream, period, user, &active);
                    }
                }
            } else {
                hub_chatter(stream, period, &activists);
                hub_chatter(stream, period, &rivals);
                grow_community(stream, &mut community, activists.len());
                let layer = HubLayer {
                    hubs: &activists,
                    rivals: &rivals,
                    rival_share: spec.rival_share,
                };
                let p_peer = peer_rate(spec, period, spec.takeover_period);
                attach_round(stream, spec, period, &active, &community, &layer, p_peer);
            }
            population.extend(newcomers);
        }
    }
}

pub struct Waves;

impl Waves {
    fn group_round(
        stream: &mut Stream,
        spec: &GeneratorSpec,
        period: usize,
        members: &[UserId],
        other_speakers: &[UserId],
    ) -> Vec<UserId> {
        let mut members = members.to_vec();
        stream.draw.shuffle(&mut members);
        let n_speakers = ((members.len() as f64 * SPEAKER_SHARE).ceil() as usize).max(1);
        let (speakers, listeners) = members.split_at(n_speakers.min(members.len()));
        for &s in speakers {
            stream.post(period, s, Act::Plain);
        }
        for &l in listeners {
            let first = stream.draw.pick(speakers);
            let second = if stream.draw.chance(spec.chatter_rate) {
                stream.draw.pick_other(speakers, first)
            } else {
                None
            };
            let act = match second {
                Some(second) => Act::RetweetMention(first, second),
                None => Act::Retweet(first),
            };
            stream.post(period, l, act);
            if !other_speakers.is_empty() && stream.draw.chance(spec.cross_rate) {
                let target = stream.draw.pick(other_speakers);
                stream.post(period, l, Act::Mention(target));
            }
        }
        speakers.to_vec()
    }
}

impl Regime for Waves {
    fn name(&self) -> &'static str {
        "waves"
    }

    fn description(&self) -> &'static str {
        "short-lived participant waves that talk within their own group"
    }

    fn simulate(&self, spec: &GeneratorSpec, stream: &mut Stream) {
        let mut previous: Vec<UserId> = Vec::new();
        for period in 1..=spec.periods {
            let wave = stream.new_users("u", spec.incomers(period));
            if previous.is_empty() {
                Self::group_round(stream, spec, period, &wave, &[]);
            } else {
                // speakers of the older group are drawn first so the newer
                // group can reach them
                let old_speakers = Self::group_round(stream, spec, period, &previous, &[]);
                Self::group_round(stream, spec, period, &wave, &old_speakers);
            }
            previous = wave;
        }
    }
}
