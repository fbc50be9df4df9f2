use std::io::Cursor;

use eeppr::io::{
    decode_binary, encode_binary, parse_text, read_events, write_binary, write_text, EventIoError,
    Format, ReadOptions, HEADER_LEN, RECORD_LEN,
};
use eeppr::synth::{generate, SynthSpec};
use eeppr::{EventStream, StreamError};

fn sample() -> EventStream {
    generate(&SynthSpec::rotating_dot(25.0, 120_000).with_noise(20.0).with_seed(3)).unwrap()
}

#[test]
fn binary_file_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let s = sample();
    let a = dir.path().join("a.evs");
    let b = dir.path().join("b.evs");
    write_binary(&s, &a).unwrap();
    let back = read_events(&a, Format::Auto, &ReadOptions::default()).unwrap();
    assert_eq!(back.events(), s.events());
    assert_eq!((back.width(), back.height(), back.duration_us()), (s.width(), s.height(), s.duration_us()));
    write_binary(&back, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::metadata(&a).unwrap().len() as usize, HEADER_LEN + RECORD_LEN * s.len());
}

#[test]
fn text_file_round_trip_is_value_identical() {
    let dir = tempfile::tempdir().unwrap();
    let s = sample();
    let path = dir.path().join("a.csv");
    write_text(&s, &path).unwrap();
    let opts = ReadOptions {
        width: Some(s.width()),
        height: Some(s.height()),
        ..Default::default()
    };
    let back = read_events(&path, Format::Auto, &opts).unwrap();
    assert_eq!(back.events(), s.events());
}

#[test]
fn malformed_binary_inputs_are_reported() {
    let s = sample();
    let good = encode_binary(&s);

    let mut bad_magic = good.clone();
    bad_magic[0] = b'X';
    assert!(matches!(decode_binary(&bad_magic, false), Err(EventIoError::BadMagic)));

    assert!(matches!(decode_binary(&good[..10], false), Err(EventIoError::TruncatedFile)));
    assert!(matches!(decode_binary(&good[..good.len() - 3], false), Err(EventIoError::TruncatedFile)));

    let dropped = &good[..good.len() - RECORD_LEN];
    assert!(matches!(
        decode_binary(dropped, false),
        Err(EventIoError::CountMismatch { found, .. }) if found as usize == s.len() - 1
    ));

    let mut bad_p = good.clone();
    bad_p[HEADER_LEN + 12] = 7;
    assert!(matches!(decode_binary(&bad_p, false), Err(EventIoError::InvalidRecord(0))));

    let mut outside = good.clone();
    outside[HEADER_LEN + 8..HEADER_LEN + 10].copy_from_slice(&u16::MAX.to_le_bytes());
    assert!(matches!(
        decode_binary(&outside, false),
        Err(EventIoError::Stream(StreamError::OutOfRangeEvent(_)))
    ));
}

#[test]
fn unsorted_binary_is_sorted_unless_strict() {
    let s = sample();
    let mut bytes = encode_binary(&s);
    let (a, b) = (HEADER_LEN, HEADER_LEN + RECORD_LEN * (s.len() - 1));
    let first: Vec<u8> = bytes[a..a + RECORD_LEN].to_vec();
    let last: Vec<u8> = bytes[b..b + RECORD_LEN].to_vec();
    bytes[a..a + RECORD_LEN].copy_from_slice(&last);
    bytes[b..b + RECORD_LEN].copy_from_slice(&first);
    assert!(matches!(
        decode_binary(&bytes, true),
        Err(EventIoError::Stream(StreamError::Unsorted(_)))
    ));
    let sorted = decode_binary(&bytes, false).unwrap();
    assert!(sorted.events().windows(2).all(|w| w[0].t <= w[1].t));
    assert_eq!(sorted.len(), s.len());
}

#[test]
fn malformed_text_lines_name_the_line() {
    let cases = [
        ("0,1,2,1\n5,1,2\n", 2),
        ("t,x,y,p\n0,1,2,1\n5,a,2,0\n", 3),
        ("0,1,2,2\n", 1),
        ("-5,1,2,1\n", 1),
        ("0,1,2,1\n\n7,1,99999999,0\n", 3),
    ];
    for (text, line) in cases {
        let err = parse_text(Cursor::new(text), &ReadOptions::default()).unwrap_err();
        assert_eq!(err.line(), Some(line), "{text:?}: {err}");
    }
}

#[test]
fn text_event_outside_declared_sensor_is_rejected() {
    let opts = ReadOptions {
        width: Some(4),
        height: Some(4),
        ..Default::default()
    };
    let err = parse_text(Cursor::new("0,1,1,1\n10,9,1,0\n"), &opts).unwrap_err();
    assert!(matches!(err, EventIoError::Stream(StreamError::OutOfRangeEvent(1))), "{err}");
}

#[test]
fn arbitrary_bytes_never_panic() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let good = encode_binary(&sample());
    for _ in 0..500 {
        let mut b = good[..rng.random_range(0..good.len().min(400))].to_vec();
        for _ in 0..rng.random_range(0..6) {
            if !b.is_empty() {
                let i = rng.random_range(0..b.len());
                b[i] = rng.random();
            }
        }
        let _ = decode_binary(&b, rng.random_bool(0.5));
        let text: String = b.iter().map(|&c| (c % 96 + 32) as char).collect();
        let _ = parse_text(Cursor::new(text), &ReadOptions::default());
    }
}
