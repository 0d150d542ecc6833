"""entrypoint for tax-service"""
