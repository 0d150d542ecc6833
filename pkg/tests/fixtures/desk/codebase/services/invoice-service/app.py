"""entrypoint for invoice-service"""
