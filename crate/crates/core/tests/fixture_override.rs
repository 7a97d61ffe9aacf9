use deforma::fixtures;

#[test]
fn environment_directory_overrides_bundled_fixtures() {
    let dir = std::env::temp_dir().join(format!("deforma-fixtures-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text =
        fixtures::source("abelian_line").unwrap().replace("\"name\": \"abelian_line\"", "\"name\": \"line_override\"");
    std::fs::write(dir.join("abelian_line.json"), text).unwrap();
    std::env::set_var(fixtures::ENV_VAR, &dir);
    assert_eq!(fixtures::load("abelian_line").unwrap().name(), "line_override");
    assert_eq!(fixtures::load("gl2").unwrap().name(), "gl2");
    std::fs::write(dir.join("gl2.json"), "{ not json").unwrap();
    assert!(matches!(fixtures::load("gl2"), Err(deforma::Error::Parse(_))));
    std::env::remove_var(fixtures::ENV_VAR);
    assert_eq!(fixtures::load("abelian_line").unwrap().name(), "abelian_line");
    std::fs::remove_dir_all(&dir).unwrap();
}
