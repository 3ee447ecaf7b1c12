"""Shared fixtures: a small hand-written graph used across unit tests."""

import pytest

from tabkg.kg import KnowledgeGraph

ONT = "http://ex.org/o/"
ENT = "http://ex.org/e/"
XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"

TINY_TRIPLES = f"""
<{ONT}City> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <{ONT}Settlement> .
<{ONT}Settlement> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <{ONT}Place> .
<{ONT}Country> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <{ONT}Place> .
<{ONT}Person> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <{ONT}Agent> .
<{ONT}City> <http://www.w3.org/2000/01/rdf-schema#label> "City" .
<{ONT}Settlement> <http://www.w3.org/2000/01/rdf-schema#label> "Settlement" .
<{ONT}Place> <http://www.w3.org/2000/01/rdf-schema#label> "Place" .
<{ONT}Country> <http://www.w3.org/2000/01/rdf-schema#label> "Country" .
<{ONT}Person> <http://www.w3.org/2000/01/rdf-schema#label> "Person" .
<{ONT}Agent> <http://www.w3.org/2000/01/rdf-schema#label> "Agent" .
<{ENT}Tokyo> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{ONT}City> .
<{ENT}Tokyo> <http://www.w3.org/2000/01/rdf-schema#label> "Tokyo"@en .
<{ENT}Tokyo> <http://www.w3.org/2000/01/rdf-schema#label> "Tokio"@de .
<{ENT}Tokyo> <{ONT}population> "13929286"^^<{XSD_INT}> .
<{ENT}Tokyo> <{ONT}motto> "Peace and Prosperity" .
<{ENT}Tokyo> <{ONT}country> <{ENT}Japan> .
<{ENT}Osaka> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{ONT}City> .
<{ENT}Osaka> <http://www.w3.org/2000/01/rdf-schema#label> "Osaka" .
<{ENT}Osaka> <{ONT}population> "2691185"^^<{XSD_INT}> .
<{ENT}Osaka> <{ONT}country> <{ENT}Japan> .
<{ENT}Paris> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{ONT}City> .
<{ENT}Paris> <http://www.w3.org/2000/01/rdf-schema#label> "Paris"@en .
<{ENT}Paris> <{ONT}population> "2148327"^^<{XSD_INT}> .
<{ENT}Paris> <{ONT}country> <{ENT}France> .
<{ENT}Japan> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{ONT}Country> .
<{ENT}Japan> <http://www.w3.org/2000/01/rdf-schema#label> "Japan"@en .
<{ENT}Japan> <{ONT}capital> <{ENT}Tokyo> .
<{ENT}Japan> <{ONT}foundingYear> "660"^^<{XSD_INT}> .
<{ENT}France> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{ONT}Country> .
<{ENT}France> <http://www.w3.org/2000/01/rdf-schema#label> "France" .
<{ENT}France> <{ONT}capital> <{ENT}Paris> .
<{ENT}USA> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{ONT}Country> .
<{ENT}USA> <http://www.w3.org/2000/01/rdf-schema#label> "United States of America"@en .
<{ENT}Ada> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{ONT}Person> .
<{ENT}Ada> <http://www.w3.org/2000/01/rdf-schema#label> "Ada Lovelace" .
<{ENT}Ada> <{ONT}birthDate> "1815-12-10" .
<{ENT}Ada> <{ONT}birthPlace> <{ENT}Paris> .
""".strip()


@pytest.fixture(scope="session")
def tiny_kg() -> KnowledgeGraph:
    return KnowledgeGraph.from_lines(TINY_TRIPLES.splitlines())


def e(name: str) -> str:
    return ENT + name


def o(name: str) -> str:
    return ONT + name
