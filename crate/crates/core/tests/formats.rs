mod common;

use common::fixture;
use qcjscc::fixed::{FixedFormat, TanhLut};
use qcjscc::pbm::{Bitmap, PbmFormat};
use qcjscc::{codefile, textio, Error, QcCode};

#[test]
fn fixture_code_roundtrips_and_matches_construction() {
    let text = std::fs::read_to_string(fixture("code_z160.txt")).unwrap();
    let code = codefile::parse(&text).unwrap();
    assert_eq!(codefile::serialize(&code), text);
    assert_eq!(code, QcCode::construct(1, 160).unwrap());
}

#[test]
fn code_file_errors_carry_line_numbers() {
    let text = codefile::serialize(&QcCode::construct(1, 4).unwrap());
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[60] = lines[60].replacen("0", "x", 1);
    match codefile::parse(&lines.join("\n")) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 61),
        other => panic!("{other:?}"),
    }
    assert!(codefile::parse("JSCC-QC v2 z=4 rows=50 cols=90\n").is_err());
}

#[test]
fn lut_fixture_parses_to_the_built_table() {
    let hex = std::fs::read_to_string(fixture("q6_lut.hex")).unwrap();
    let parsed = TanhLut::from_hex(&hex, FixedFormat::Q6).unwrap();
    assert_eq!(&parsed, TanhLut::q6());
    assert!(TanhLut::from_hex(&hex[3..], FixedFormat::Q6).is_err());
}

#[test]
fn feature_image_has_design_density() {
    let img = Bitmap::load(fixture("feature.pbm")).unwrap();
    assert_eq!((img.width(), img.height()), (160, 40));
    assert_eq!(img.bits().count_ones(), 255);
    assert!((img.density() - 0.0398).abs() < 1e-4);
    let binary = img.to_bytes(PbmFormat::Binary);
    assert_eq!(Bitmap::parse(&binary).unwrap(), img);
}

#[test]
fn fixture_frame_files_are_consistent() {
    let llr = textio::read_llrs(fixture("frame_llr.txt")).unwrap();
    let s = textio::read_bits(fixture("frame_source.txt")).unwrap();
    assert_eq!((llr.len(), s.len()), (8000, 6400));
    assert!(llr.iter().all(|x| x.is_finite()));
}
