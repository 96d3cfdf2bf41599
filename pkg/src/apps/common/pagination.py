"""Pagination defaults for the Rabbit Hunt API."""

from __future__ import annotations

from rest_framework.pagination import PageNumberPagination


class StandardResultsSetPagination(PageNumberPagination):
    """Page-number pagination for recorded runs."""

    page_size = 20
    page_size_query_param = "page_size"
    max_page_size = 100
