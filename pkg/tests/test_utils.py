"""Tests for the utils module."""
import io
import json
import logging
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
from jsonschema.exceptions import ValidationError

from permcumulants.base import StructureError
from permcumulants.ratfun import RatFun
from permcumulants.utils import (
    OutputFormat,
    conf_logger,
    flatten,
    logger,
    make_document,
    parse_int_list,
    read_config_file,
    render_document,
    to_jsonable,
    validate_document,
    write_document,
    write_raw_csv,
)
from tests.utils import PermCumulantsTestCase


class TestReadConfig(PermCumulantsTestCase):
    """Tests for the read_config_file function."""

    def test_valid(self) -> None:
        config = read_config_file("tests/examples/example_config.yaml")
        self.assertEqual(11, config["montecarlo"]["seed"])
        self.assertEqual(["1/2", 1], config["sweep"]["thetas"])

    def test_invalid(self) -> None:
        with self.assertRaises(StructureError):
            read_config_file("tests/examples/invalid_config.yaml")

    def test_empty_and_not_a_mapping(self) -> None:
        with TemporaryDirectory() as directory:
            empty = Path(directory) / "empty.yaml"
            empty.write_text("", encoding="utf-8")
            self.assertEqual({}, read_config_file(empty))
            listing = Path(directory) / "list.yaml"
            listing.write_text("- 1\n- 2\n", encoding="utf-8")
            with self.assertRaises(StructureError):
                read_config_file(listing)


class TestDocuments(PermCumulantsTestCase):
    """Tests for JSON conversion and rendering."""

    def test_to_jsonable(self) -> None:
        self.assertEqual("3/4", to_jsonable(Fraction(3, 4)))
        self.assertEqual("2", to_jsonable(Fraction(2)))
        self.assertEqual(5, to_jsonable(np.int64(5)))
        self.assertEqual([1, 2], to_jsonable(frozenset({2, 1})))
        self.assertEqual({"1": 0.5}, to_jsonable({1: np.float64(0.5)}))
        self.assertEqual("-inf", to_jsonable(float("-inf")))
        self.assertEqual("1/N", to_jsonable(1 / RatFun.variable())["ratfun"])
        self.assertEqual("json", to_jsonable(OutputFormat.JSON))
        self.assertEqual(0.333333333333333, to_jsonable(1 / 3))

    def test_make_document(self) -> None:
        document = make_document("psi", {"sigma": "2,1"}, {"text": "2,1"}, verdict=None)
        self.assertEqual("1.0", document["schema_version"])
        self.assertIsNone(document["verdict"])
        validate_document(document)
        with self.assertRaises(ValidationError):
            validate_document({**document, "command": "make-tables"})
        with self.assertRaises(ValidationError):
            validate_document({**document, "extra": 1})

    def test_flatten(self) -> None:
        self.assertEqual(
            [("a.b", 1), ("a.c", "1,2"), ("d.0.e", 3)],
            flatten({"a": {"b": 1, "c": [1, 2]}, "d": [{"e": 3}]}),
        )

    def test_render(self) -> None:
        document = make_document("shape-word", {}, {"word": "101", "size": 4}, verdict="pass")
        self.assertEqual(document, json.loads(render_document(document)))
        csv = render_document(document, OutputFormat.CSV)
        self.assertEqual("key,value\nresult.word,101\nresult.size,4\nverdict,pass\n", csv)
        table = render_document(document, OutputFormat.PRETTY, [{"a": 1, "b": [2, 3]}])
        self.assertTrue(table.startswith("shape-word\n"))
        self.assertIn("2,3", table)

    def test_write_document(self) -> None:
        document = make_document("psi", {}, {"text": "1"})
        stream = io.StringIO()
        write_document(document, stream=stream)
        self.assertIn('"text": "1"', stream.getvalue())
        with TemporaryDirectory() as directory:
            path = Path(directory) / "out.csv"
            write_document(document, OutputFormat.CSV, path)
            self.assertEqual("key,value\nresult.text,1\n", path.read_text(encoding="utf-8"))

    def test_write_raw_csv(self) -> None:
        with TemporaryDirectory() as directory:
            path = Path(directory) / "raw.csv"
            write_raw_csv(path, np.array([3, 4]), ["gamma_1"])
            self.assertEqual("sample,gamma_1\n0,3\n1,4\n", path.read_text(encoding="utf-8"))

    def test_parse_int_list(self) -> None:
        self.assertEqual([1, 3, 5], parse_int_list("1,3,5"))
        self.assertEqual([1, 2], parse_int_list(" [1, 2] "))
        with self.assertRaises(StructureError):
            parse_int_list("1,a")


class TestLogging(PermCumulantsTestCase):
    """Tests for conf_logger."""

    def test_levels(self) -> None:
        conf_logger(False)
        self.assertFalse(logger.isEnabledFor(logging.DEBUG))
        self.assertTrue(logger.isEnabledFor(logging.INFO))
        conf_logger(True)
        self.assertTrue(logger.isEnabledFor(logging.DEBUG))
