//! Emoticon recognizer.
//!
//! Emoticons are recognized by a small recursive transition network. Each
//! network is a list of arcs between numbered states; an arc either consumes
//! one character from a class or pushes into another network and resumes
//! wherever that network can finish. Every network consumes at least one
//! character before it can accept, so the interpreter never loops without
//! making progress.
//!
//! The whole inventory lives in [`NETWORKS`]. Adding a face is a table edit.

/// Identifies one sub-network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Net {
    Emoticon,
    Forward,
    Reversed,
    Symbol,
    Eyes,
    Nose,
    Mouth,
    ReversedMouth,
}

#[derive(Clone, Copy, Debug)]
enum Arc {
    /// Consume one character contained in the string.
    Class(&'static str),
    /// Push into a sub-network.
    Push(Net),
}

struct Network {
    net: Net,
    /// `(from, arc, to)`; state 0 is the entry state.
    arcs: &'static [(u8, Arc, u8)],
    finals: &'static [u8],
}

const EYES: &str = ":;=";
const NOSES: &str = "-=";
const MOUTHS: &str = ")(DPpSs0OoL/\\[]>|";
const REVERSED_MOUTHS: &str = "()[]D|/\\";

static NETWORKS: &[Network] = &[
    Network {
        net: Net::Emoticon,
        arcs: &[
            (0, Arc::Push(Net::Forward), 1),
            (0, Arc::Push(Net::Reversed), 1),
            (0, Arc::Push(Net::Symbol), 1),
        ],
        finals: &[1],
    },
    // eyes [nose] mouth, e.g. ":)", ";->", ":=)"
    Network {
        net: Net::Forward,
        arcs: &[
            (0, Arc::Push(Net::Eyes), 1),
            (1, Arc::Push(Net::Nose), 2),
            (1, Arc::Push(Net::Mouth), 3),
            (2, Arc::Push(Net::Mouth), 3),
        ],
        finals: &[3],
    },
    // mouth [nose] eyes, e.g. "(=", "D:", "(=:"
    Network {
        net: Net::Reversed,
        arcs: &[
            (0, Arc::Push(Net::ReversedMouth), 1),
            (1, Arc::Push(Net::Nose), 2),
            (1, Arc::Push(Net::Eyes), 3),
            (2, Arc::Push(Net::Eyes), 3),
        ],
        finals: &[3],
    },
    // non-face symbols: "<3", "</3"
    Network {
        net: Net::Symbol,
        arcs: &[
            (0, Arc::Class("<"), 1),
            (1, Arc::Class("3"), 3),
            (1, Arc::Class("/"), 2),
            (2, Arc::Class("3"), 3),
        ],
        finals: &[3],
    },
    Network {
        net: Net::Eyes,
        arcs: &[(0, Arc::Class(EYES), 1)],
        finals: &[1],
    },
    Network {
        net: Net::Nose,
        arcs: &[(0, Arc::Class(NOSES), 1)],
        finals: &[1],
    },
    Network {
        net: Net::Mouth,
        arcs: &[(0, Arc::Class(MOUTHS), 1)],
        finals: &[1],
    },
    Network {
        net: Net::ReversedMouth,
        arcs: &[(0, Arc::Class(REVERSED_MOUTHS), 1)],
        finals: &[1],
    },
];

fn network(net: Net) -> &'static Network {
    NETWORKS
        .iter()
        .find(|n| n.net == net)
        .expect("every Net variant has a table entry")
}

/// All offsets at which `net` can finish when entered at `pos`.
fn run(net: Net, chars: &[char], pos: usize) -> Vec<usize> {
    let network = network(net);
    let mut ends = Vec::new();
    // (state, offset) configurations still to explore
    let mut agenda = vec![(0u8, pos)];
    while let Some((state, at)) = agenda.pop() {
        if network.finals.contains(&state) && !ends.contains(&at) {
            ends.push(at);
        }
        for &(from, arc, to) in network.arcs {
            if from != state {
                continue;
            }
            match arc {
                Arc::Class(class) => {
                    if let Some(&c) = chars.get(at) {
                        if class.contains(c) {
                            agenda.push((to, at + 1));
                        }
                    }
                }
                Arc::Push(sub) => {
                    for end in run(sub, chars, at) {
                        agenda.push((to, end));
                    }
                }
            }
        }
    }
    ends
}

/// Length of the longest emoticon starting at character offset `pos`.
///
/// An emoticon whose last character is a letter or digit must not run
/// straight into another letter or digit (":Do" is not ":D" + "o"), and one
/// that starts with a letter must not begin in the middle of a word.
pub(crate) fn scan_chars(chars: &[char], pos: usize) -> Option<usize> {
    if pos >= chars.len() {
        return None;
    }
    if chars[pos].is_alphanumeric() && pos > 0 && chars[pos - 1].is_alphanumeric() {
        return None;
    }
    run(Net::Emoticon, chars, pos)
        .into_iter()
        .filter(|&end| {
            let last = chars[end - 1];
            !(last.is_alphanumeric() && chars.get(end).is_some_and(|c| c.is_alphanumeric()))
        })
        .max()
        .map(|end| end - pos)
}

/// Recognize an emoticon at character offset `pos` of `s`.
///
/// Returns the length in characters of the longest emoticon starting there,
/// or `None` when no emoticon starts at `pos`.
pub fn scan_emoticon(s: &str, pos: usize) -> Option<usize> {
    let chars: Vec<char> = s.chars().collect();
    scan_chars(&chars, pos)
}

/// Pictographic characters (emoji) are treated as emoticons too.
pub(crate) fn is_pictograph(c: char) -> bool {
    matches!(c as u32,
        0x1F300..=0x1F5FF
        | 0x1F600..=0x1F64F
        | 0x1F680..=0x1F6FF
        | 0x1F900..=0x1F9FF
        | 0x1FA70..=0x1FAFF
        | 0x2600..=0x27BF)
}

/// Characters that attach to a preceding pictograph.
pub(crate) fn is_pictograph_modifier(c: char) -> bool {
    matches!(c as u32, 0xFE0F | 0x200D | 0x1F3FB..=0x1F3FF)
}
